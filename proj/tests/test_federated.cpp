#include <cmath>
#include <memory>

#include <gtest/gtest.h>

#include "dsgda/error.hpp"
#include "dsgda/federated.hpp"
#include "dsgda/random_games.hpp"
#include "dsgda/rng.hpp"
#include "dsgda/solver.hpp"

using namespace dsgda;

namespace {

using Clients = std::vector<std::shared_ptr<const TwoPlayerGame>>;

std::shared_ptr<const QuadraticGame> quad(const QuadraticGame& g) { return std::make_shared<QuadraticGame>(g); }

FederatedRunConfig fed_config(const std::vector<Index>& dims, double gamma, int K, int R, std::uint64_t seed = 0) {
  FederatedRunConfig cfg;
  cfg.gamma = gamma;
  cfg.K = K;
  cfg.R = R;
  cfg.seed = seed;
  cfg.init = JointPoint(dims);
  cfg.init.u().setConstant(1.0);
  cfg.init.v().setConstant(-1.0);
  return cfg;
}

void expect_same_points(const RunTrace& a, const RunTrace& b, double tol) {
  ASSERT_EQ(a.rounds.size(), b.rounds.size());
  for (std::size_t r = 0; r < a.rounds.size(); ++r) {
    ASSERT_LE((a.rounds[r].point.flat() - b.rounds[r].point.flat()).cwiseAbs().maxCoeff(), tol) << "round " << r;
  }
}

}  // namespace

TEST(FederatedProblem, ValidatesClients) {
  EXPECT_THROW(FederatedProblem(Clients{}), InvalidArgument);
  EXPECT_THROW(FederatedProblem(Clients{quad(QuadraticGame::scalar(1, 1, 0))}, -1.0), InvalidArgument);
  Clients mixed{quad(QuadraticGame::scalar(1, 1, 0)),
                quad(QuadraticGame(Matrix::Identity(2, 2), Matrix::Identity(1, 1), Matrix::Zero(2, 1)))};
  EXPECT_THROW(FederatedProblem{mixed}, DimensionError);
}

TEST(FederatedProblem, GlobalGameIsTheAverage) {
  const FederatedProblem p(Clients{quad(QuadraticGame::scalar(1, 2, 0.5)), quad(QuadraticGame::scalar(3, 4, 1.5))});
  const QuadraticGame avg = p.averaged_quadratic();
  EXPECT_DOUBLE_EQ(avg.A()(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(avg.B()(0, 0), 3.0);
  EXPECT_DOUBLE_EQ(avg.C()(0, 0), 1.0);
  const JointPoint x = JointPoint::two_player(0.3, -0.7);
  EXPECT_EQ(operator_F(p.global(), x).flat(), operator_F(avg, x).flat());
}

TEST(FederatedProblem, AveragesNonQuadraticClients) {
  const FederatedProblem p(Clients{std::make_shared<ToyGanGame>(Matrix::Identity(2, 2), 0.1, 0.2),
                                   std::make_shared<ToyGanGame>(2.0 * Matrix::Identity(2, 2), 0.1, 0.2)});
  EXPECT_FALSE(p.all_quadratic());
  EXPECT_THROW(p.averaged_quadratic(), Unsupported);
  EXPECT_THROW(measure_zeta_star(p), Unsupported);
  const ToyGanGame mid(1.5 * Matrix::Identity(2, 2), 0.1, 0.2);
  JointPoint x({2, 4});
  x.flat() << 0.3, -0.2, 0.1, 0.5, -0.4, 0.2;
  EXPECT_LT((operator_F(p.global(), x).flat() - operator_F(mid, x).flat()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ZetaStar, Examples) {
  RngStream rng(1, 0);
  const QuadraticGame g = random_quadratic(2, 2, 1.0, EigenRange{}, rng);
  EXPECT_NEAR(measure_zeta_star(FederatedProblem(Clients{quad(g), quad(g), quad(g)})), 0.0, 1e-14);
  EXPECT_NEAR(measure_zeta_star(FederatedProblem(Clients{quad(g)})), 0.0, 1e-14);
  const double beta = 0.7;
  Matrix one = Matrix::Identity(1, 1);
  const QuadraticGame plus(one, one, Matrix::Zero(1, 1), Vector::Constant(1, beta), Vector::Zero(1));
  const QuadraticGame minus(one, one, Matrix::Zero(1, 1), Vector::Constant(1, -beta), Vector::Zero(1));
  EXPECT_NEAR(measure_zeta_star(FederatedProblem(Clients{quad(plus), quad(minus)})), beta, 1e-15);
}

TEST(FederatedDecoupled, SingleClientMatchesTwoPlayerRunWithOwnerNoise) {
  RngStream rng(2, 0);
  for (int i = 0; i < 10; ++i) {
    const QuadraticGame g = random_quadratic(2, 3, 1.5, EigenRange{}, rng);
    const FederatedProblem p(Clients{quad(g)}, 0.4, 11);
    const FederatedRunConfig fc = fed_config(g.block_dims(), 0.03, 1 + i, 12, 5 + i);
    RunConfig rc;
    rc.gamma = fc.gamma;
    rc.K = fc.K;
    rc.R = fc.R;
    rc.seed = fc.seed;
    rc.init = fc.init;
    rc.noise = NoiseModel(NoiseLevels{0.4, 0.0, 0.0, 0.4, 0.0}, 0, 11);
    rc.noise_source = NoiseSource::OwnerOracles;
    const RunTrace a = federated_decoupled_run(p, fc);
    expect_same_points(a, run(g, rc), 1e-12);
    EXPECT_EQ(a.clients, 1);
    EXPECT_EQ(a.last().oracle_calls, 2LL * fc.K * fc.R);
  }
}

TEST(FederatedDecoupled, HomogeneousClientsMatchSingleClientWithoutNoise) {
  RngStream rng(3, 0);
  const QuadraticGame g = random_quadratic(3, 2, 2.0, EigenRange{}, rng);
  const FederatedRunConfig cfg = fed_config(g.block_dims(), 0.02, 6, 20);
  const RunTrace one = federated_decoupled_run(FederatedProblem(Clients{quad(g)}), cfg);
  const RunTrace four = federated_decoupled_run(FederatedProblem(Clients{quad(g), quad(g), quad(g), quad(g)}), cfg);
  expect_same_points(one, four, 1e-12);
  EXPECT_EQ(four.last().oracle_calls, 4 * one.last().oracle_calls);
}

TEST(FederatedDecoupled, HeterogeneousPlateauBelowHeterogeneityTerm) {
  RngStream rng(4, 0);
  for (int i = 0; i < 10; ++i) {
    Clients clients;
    for (int m = 0; m < 3; ++m) {
      const double a = rng.uniform(1.0, 3.0), b = rng.uniform(1.0, 3.0), c = rng.uniform(0.0, 0.5);
      clients.push_back(quad(QuadraticGame(Matrix::Constant(1, 1, a), Matrix::Constant(1, 1, b),
                                           Matrix::Constant(1, 1, c), Vector::Constant(1, rng.uniform(-1, 1)),
                                           Vector::Constant(1, rng.uniform(-1, 1)))));
    }
    const FederatedProblem p(clients);
    const FederatedConstants fc = federated_constants(p);
    const double zeta = measure_zeta_star(p);
    ASSERT_GT(zeta, 0.0);
    const int K = 5;
    const double gamma = fc.mu / (32.0 * fc.L * fc.L * K);
    const RunTrace t = federated_decoupled_run(p, fed_config({1, 1}, gamma, K, 4000));
    const FederatedRateBound b = federated_rate_bound(fc, gamma, K, 4000, 3, 1.0, 0.0, zeta);
    EXPECT_TRUE(b.within_hypotheses);
    EXPECT_LE(*t.last().dist_sq, b.heterogeneity_term + b.exponential_term * 2.0 + 1e-15);
  }
}

TEST(LocalSgdaMClient, SingleClientSingleStepIsGda) {
  RngStream rng(5, 0);
  const QuadraticGame g = random_quadratic(2, 2, 1.0, EigenRange{}, rng);
  const FederatedRunConfig fc = fed_config(g.block_dims(), 0.05, 1, 15);
  RunConfig rc;
  rc.method = Method::Gda;
  rc.gamma = fc.gamma;
  rc.R = fc.R;
  rc.init = fc.init;
  expect_same_points(local_sgda_mclient(FederatedProblem(Clients{quad(g)}), fc), run(g, rc), 1e-14);
}

TEST(LocalSgdaMClient, HomogeneousMatchesKStepsOfGda) {
  RngStream rng(6, 0);
  const QuadraticGame g = random_quadratic(2, 2, 1.0, EigenRange{}, rng);
  const FederatedRunConfig fc = fed_config(g.block_dims(), 0.05, 4, 10);
  RunConfig rc;
  rc.method = Method::Gda;
  rc.gamma = fc.gamma;
  rc.R = fc.R * fc.K;
  rc.init = fc.init;
  const RunTrace fed = local_sgda_mclient(FederatedProblem(Clients{quad(g), quad(g), quad(g)}), fc);
  const RunTrace gda = run(g, rc);
  for (int r = 0; r <= fc.R; ++r) {
    EXPECT_LE((fed.rounds[r].point.flat() - gda.rounds[r * fc.K].point.flat()).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(LocalSgdaMClient, DecoupledWinsUnderWeakCoupling) {
  RngStream rng(7, 0);
  Clients clients;
  for (int m = 0; m < 4; ++m) clients.push_back(quad(random_quadratic(3, 3, 0.05, EigenRange{}, rng)));
  const FederatedProblem p(clients);
  const FederatedRunConfig cfg = fed_config({3, 3}, 0.01, 40, 50);
  EXPECT_LT(federated_decoupled_run(p, cfg).min_grad_norm(), local_sgda_mclient(p, cfg).min_grad_norm());
}

TEST(TwoOracleLocalSgda, NoiselessSingleStepIsGda) {
  RngStream rng(8, 0);
  const QuadraticGame g = random_quadratic(2, 3, 1.0, EigenRange{}, rng);
  RunConfig rc;
  rc.method = Method::Gda;
  rc.gamma = 0.05;
  rc.K = 1;
  rc.R = 10;
  rc.init = random_point(g.block_dims(), 1.0, rng);
  expect_same_points(two_oracle_local_sgda(g, rc), run(g, rc), 1e-15);
}

TEST(TwoOracleLocalSgda, NoiselessUncoupledFollowsTrueDynamics) {
  const QuadraticGame g = QuadraticGame::scalar(1.0, 2.0, 0.0);
  RunConfig rc;
  rc.gamma = 0.1;
  rc.K = 5;
  rc.R = 3;
  rc.init = JointPoint::two_player(1.0, 1.0);
  const RunTrace t = two_oracle_local_sgda(g, rc);
  EXPECT_NEAR(t.last().point.u()(0), std::pow(0.9, 15), 1e-14);
  EXPECT_NEAR(t.last().point.v()(0), std::pow(0.8, 15), 1e-14);
}

TEST(TwoOracleLocalSgda, CrossNoiseDegradesAttainedGradientNorm) {
  RngStream rng(9, 0);
  const QuadraticGame g = random_quadratic(5, 5, 1.0, EigenRange{std::pow(10.0, -0.25), 10.0}, rng);
  auto attained = [&](double cross) {
    double acc = 0.0;
    for (int s = 0; s < 5; ++s) {
      RunConfig rc;
      rc.gamma = 0.01;
      rc.K = 40;
      rc.R = 100;
      rc.seed = s;
      rc.init = JointPoint(g.block_dims());
      rc.init.flat().setOnes();
      rc.noise = NoiseModel(NoiseLevels{1.0, cross, cross, 1.0, 0.0}, 0);
      acc += two_oracle_local_sgda(g, rc).min_grad_norm();
    }
    return acc / 5.0;
  };
  EXPECT_GT(attained(std::sqrt(10.0)), attained(1.0));
}

TEST(FederatedRateBound, Examples) {
  const FederatedConstants c{2.0, 1.0};
  const double gamma = 0.001;
  const int K = 4;
  const int R = static_cast<int>(std::lround(2.0 / (gamma * c.mu * K)));
  const FederatedRateBound b = federated_rate_bound(c, gamma, K, R, 3, 1.0, 0.0, 0.0);
  EXPECT_NEAR(b.value, std::exp(-1.0), 1e-12);
  EXPECT_DOUBLE_EQ(b.value, b.exponential_term);
  const FederatedRateBound m1 = federated_rate_bound(c, gamma, K, R, 1, 1.0, 0.7, 0.2);
  const FederatedRateBound m2 = federated_rate_bound(c, gamma, K, R, 2, 1.0, 0.7, 0.2);
  EXPECT_DOUBLE_EQ(m2.averaged_noise_term, 0.5 * m1.averaged_noise_term);
  EXPECT_DOUBLE_EQ(m2.drift_noise_term, m1.drift_noise_term);
  EXPECT_DOUBLE_EQ(m2.heterogeneity_term, m1.heterogeneity_term);
  EXPECT_FALSE(federated_rate_bound(c, 1.0, K, R, 1, 1.0, 0.0, 0.0).within_hypotheses);
}

TEST(FederatedConstants, UsesLargestClientBlockNorm) {
  const FederatedProblem p(Clients{quad(QuadraticGame::scalar(1, 2, 0.5)), quad(QuadraticGame::scalar(3, 1, 4.0))});
  const FederatedConstants c = federated_constants(p);
  EXPECT_DOUBLE_EQ(c.L, 4.0);
  EXPECT_DOUBLE_EQ(c.mu, 1.5);
}
