#include <cmath>

#include <gtest/gtest.h>

#include "dsgda/error.hpp"
#include "dsgda/norm.hpp"
#include "dsgda/point.hpp"
#include "dsgda/random_games.hpp"
#include "dsgda/rng.hpp"

using namespace dsgda;

TEST(JointPoint, LayoutAndBlocks) {
  JointPoint x({2, 3});
  EXPECT_EQ(x.dim(), 5);
  EXPECT_EQ(x.num_blocks(), 2u);
  EXPECT_EQ(x.block_offset(1), 2);
  x.v()(2) = 4.0;
  EXPECT_DOUBLE_EQ(x.flat()(4), 4.0);
  const JointPoint y = JointPoint::two_player(1.0, -1.0);
  EXPECT_DOUBLE_EQ(y.u()(0), 1.0);
  EXPECT_DOUBLE_EQ(y.v()(0), -1.0);
}

TEST(JointPoint, ArithmeticRejectsMismatchedLayouts) {
  JointPoint a({2, 3});
  JointPoint b({3, 2});
  EXPECT_THROW(a += b, DimensionError);
  EXPECT_THROW(a.require_layout({2, 2}, "test"), DimensionError);
  JointPoint c({2, 3});
  c.flat().setOnes();
  a += c;
  a *= 2.0;
  EXPECT_DOUBLE_EQ(a.dot(c), 10.0);
}

TEST(NormSpec, PrimalNormExamples) {
  const NormSpec id = NormSpec::identity({1, 1});
  const JointPoint x = JointPoint::two_player(3.0, 4.0);
  EXPECT_DOUBLE_EQ(id.primal_norm(x), 5.0);
  const NormSpec w = NormSpec::weighted({1, 1}, {4.0, 1.0});
  EXPECT_NEAR(w.primal_norm(x), std::sqrt(52.0), 1e-12);
  EXPECT_NEAR(w.primal_norm(x), 7.211103, 1e-6);
  EXPECT_DOUBLE_EQ(w.primal_norm(JointPoint({1, 1})), 0.0);
}

TEST(NormSpec, DualNormExamples) {
  const NormSpec id = NormSpec::identity({1, 1});
  EXPECT_DOUBLE_EQ(id.dual_norm(JointPoint::two_player(3.0, 4.0)), 5.0);
  const NormSpec w = NormSpec::weighted({1, 1}, {4.0, 1.0});
  EXPECT_DOUBLE_EQ(w.dual_norm(JointPoint::two_player(2.0, 0.0)), 1.0);
}

TEST(NormSpec, IdentityIsSelfDual) {
  RngStream rng(7, 0);
  const NormSpec id = NormSpec::identity({3, 2});
  for (int i = 0; i < 50; ++i) {
    const JointPoint g = random_point({3, 2}, 2.0, rng);
    EXPECT_NEAR(id.dual_norm(g), id.primal_norm(g), 1e-14);
  }
}

TEST(NormSpec, RejectsBadInput) {
  EXPECT_THROW(NormSpec::weighted({1, 1}, {1.0, 0.0}), InvalidArgument);
  EXPECT_THROW(NormSpec::weighted({1, 1}, {1.0, -2.0}), InvalidArgument);
  Matrix not_spd(2, 2);
  not_spd << 1.0, 2.0, 2.0, 1.0;
  EXPECT_THROW(NormSpec({1.0}, {not_spd}), InvalidArgument);
  EXPECT_THROW(NormSpec::identity({2}).primal_norm(JointPoint({3})), DimensionError);
}

class NormProperty : public ::testing::TestWithParam<int> {};

NormSpec random_spec(RngStream& rng) {
  std::vector<double> alphas{std::exp(rng.uniform(-2.0, 2.0)), std::exp(rng.uniform(-2.0, 2.0))};
  std::vector<Matrix> blocks{random_spd(3, EigenRange{0.2, 5.0}, rng), random_spd(2, EigenRange{0.2, 5.0}, rng)};
  return NormSpec(alphas, blocks);
}

TEST_P(NormProperty, DualityInequality) {
  RngStream rng(100 + GetParam(), 0);
  const NormSpec ns = random_spec(rng);
  for (int i = 0; i < 200; ++i) {
    const JointPoint g = random_point({3, 2}, 3.0, rng);
    const JointPoint x = random_point({3, 2}, 3.0, rng);
    EXPECT_LE(g.dot(x), ns.dual_norm(g) * ns.primal_norm(x) * (1.0 + 1e-12) + 1e-12);
  }
}

TEST_P(NormProperty, DualityIsTightAtInverseMetric) {
  RngStream rng(200 + GetParam(), 0);
  const NormSpec ns = random_spec(rng);
  const JointPoint g = random_point({3, 2}, 1.0, rng);
  const JointPoint x = ns.apply_inverse(g);
  EXPECT_NEAR(g.dot(x), ns.dual_norm(g) * ns.primal_norm(x), 1e-10);
}

TEST_P(NormProperty, SquareRootsAreConsistent) {
  RngStream rng(300 + GetParam(), 0);
  const NormSpec ns = random_spec(rng);
  for (std::size_t b = 0; b < 2; ++b) {
    const Matrix& P = ns.block_matrix(b);
    EXPECT_LT((ns.sqrt_block(b) * ns.sqrt_block(b) - P).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((ns.inv_sqrt_block(b) * P * ns.inv_sqrt_block(b) - Matrix::Identity(P.rows(), P.cols()))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-12);
    const Matrix& L = ns.cholesky_lower(b);
    EXPECT_LT((L * L.transpose() - P).cwiseAbs().maxCoeff(), 1e-12);
  }
  const Matrix S = ns.full_sqrt();
  const JointPoint x = random_point({3, 2}, 1.0, rng);
  EXPECT_NEAR((S * x.flat()).squaredNorm(), ns.primal_norm_sq(x), 1e-10);
  EXPECT_NEAR((ns.full_inv_sqrt() * x.flat()).squaredNorm(), ns.dual_norm_sq(x), 1e-10);
}

INSTANTIATE_TEST_SUITE_P(Seeds, NormProperty, ::testing::Range(0, 5));
