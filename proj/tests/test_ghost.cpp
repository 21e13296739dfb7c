#include <gtest/gtest.h>

#include "dsgda/ghost.hpp"
#include "dsgda/random_games.hpp"
#include "dsgda/rng.hpp"
#include "dsgda/solver.hpp"

using namespace dsgda;

TEST(Ghost, IncrementArithmetic) {
  const QuadraticGame g = QuadraticGame::scalar(1.0, 1.0, 1.0);
  const auto [x, state] = ghost_round(g, JointPoint::two_player(0.5, 0.0), JointPoint::two_player(1.0, 0.0), 0.01, 5,
                                      NormSpec::identity({1, 1}));
  EXPECT_DOUBLE_EQ(state.increment.u()(0), -0.1);
  EXPECT_DOUBLE_EQ(state.increment.v()(0), 0.0);
  EXPECT_NEAR(ghost_value(Vector::Constant(1, 0.5), state.increment.u(), 2)(0), 0.3, 1e-15);
  EXPECT_NEAR(state.ghost.u()(0), 0.0, 1e-15);
}

TEST(Ghost, FirstRoundEqualsDecoupled) {
  RngStream rng(1, 0);
  for (int i = 0; i < 20; ++i) {
    const QuadraticGame g = random_quadratic(3, 2, 2.0, EigenRange{}, rng);
    const NormSpec ns = NormSpec::weighted(g.block_dims(), {1.5, 0.7});
    const JointPoint x0 = random_point(g.block_dims(), 1.0, rng);
    const NoiseModel noise(NoiseLevels{0, 0, 0, 0, 0.4}, 9);
    const StepNoise sn{&noise, NoiseSource::DecoupledOracle, 3};
    const auto [gx, st] = ghost_round(g, x0, std::nullopt, 0.02, 7, ns, sn);
    const JointPoint dx = decoupled_round(g, x0, 0.02, 7, ns, sn);
    EXPECT_LE((gx.flat() - dx.flat()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Ghost, NoEffectWithoutCoupling) {
  RngStream rng(2, 0);
  const QuadraticGame g = random_quadratic(2, 2, 0.0, EigenRange{}, rng);
  RunConfig cfg;
  cfg.gamma = 0.05;
  cfg.K = 6;
  cfg.R = 12;
  cfg.init = random_point(g.block_dims(), 1.0, rng);
  cfg.method = Method::Ghost;
  const RunTrace ghost = run(g, cfg);
  cfg.method = Method::Decoupled;
  const RunTrace plain = run(g, cfg);
  ASSERT_EQ(ghost.rounds.size(), plain.rounds.size());
  for (std::size_t r = 0; r < ghost.rounds.size(); ++r) {
    EXPECT_LE((ghost.rounds[r].point.flat() - plain.rounds[r].point.flat()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Ghost, RunUsesPreviousRoundStart) {
  const QuadraticGame g = QuadraticGame::scalar(1.0, 10.0, 5.0);
  RunConfig cfg;
  cfg.method = Method::Ghost;
  cfg.gamma = 0.01;
  cfg.K = 4;
  cfg.R = 3;
  cfg.init = JointPoint::two_player(1.0, 1.0);
  const RunTrace t = run(g, cfg);
  const NormSpec ns = NormSpec::identity({1, 1});
  JointPoint x = cfg.init;
  std::optional<JointPoint> prev;
  for (int r = 1; r <= 3; ++r) {
    auto [next, st] = ghost_round(g, x, prev, cfg.gamma, cfg.K, ns);
    prev = x;
    x = next;
    EXPECT_EQ(t.rounds[r].point.flat(), x.flat());
  }
}

TEST(Ghost, ReachesTargetNoSlowerOnStrongCoupling) {
  for (double c : {25.0, 15.0}) {
    const QuadraticGame g = QuadraticGame::scalar(1.0, 10.0, c);
    RunConfig cfg;
    cfg.gamma = 0.002;
    cfg.K = 5;
    cfg.R = 20000;
    cfg.init = JointPoint::two_player(1.0, 1.0);
    cfg.stop = StopRule{StopMetric::Distance, 1e-6};
    cfg.method = Method::Ghost;
    const RunTrace ghost = run(g, cfg);
    cfg.method = Method::Decoupled;
    const RunTrace plain = run(g, cfg);
    ASSERT_EQ(plain.status, RunStatus::Converged);
    EXPECT_EQ(ghost.status, RunStatus::Converged);
    EXPECT_LE(ghost.executed_rounds(), plain.executed_rounds()) << "c = " << c;
  }
}
