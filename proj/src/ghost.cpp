#include "dsgda/ghost.hpp"

namespace dsgda {

Vector ghost_value(const Eigen::Ref<const Vector>& start, const Eigen::Ref<const Vector>& delta, int t) {
  return start + static_cast<double>(t) * delta;
}

std::pair<JointPoint, GhostState> ghost_round(const TwoPlayerGame& game, const JointPoint& x0,
                                              const std::optional<JointPoint>& prev_x0, double gamma, int K,
                                              const NormSpec& ns, const StepNoise& noise,
                                              std::vector<JointPoint>* steps) {
  if (K < 1) throw InvalidArgument("ghost_round: K must be >= 1");
  if (!(gamma > 0.0)) throw InvalidArgument("ghost_round: gamma must be positive");
  game.require_fits(x0, "ghost_round");
  ns.require_fits(x0, "ghost_round");

  GhostState state;
  state.prev_x0 = prev_x0;
  state.increment = JointPoint(game.block_dims());
  if (prev_x0) {
    game.require_fits(*prev_x0, "ghost_round previous point");
    state.increment = (1.0 / K) * (x0 - *prev_x0);
  }

  JointPoint x = x0;
  JointPoint ghost = x0;
  JointPoint g(game.block_dims());
  for (int t = 0; t < K; ++t) {
    ghost += state.increment;
    game.grad_u(x.u(), ghost.v(), g.u());
    game.grad_v(ghost.u(), x.v(), g.v());
    g.v() = -g.v();
    if (noise.active()) {
      const std::uint64_t call = noise.first_call + static_cast<std::uint64_t>(t);
      add_player_noise(g, 0, noise, call, ns);
      add_player_noise(g, 1, noise, call, ns);
    }
    for (std::size_t b = 0; b < 2; ++b) ns.apply_inverse_block(b, g.block(b));
    x -= gamma * g;
    if (!x.all_finite()) throw DivergenceError("ghost_round: non-finite iterate", 0, t + 1);
    if (steps) steps->push_back(x);
  }
  state.ghost = ghost;
  return {x, state};
}

}  // namespace dsgda
