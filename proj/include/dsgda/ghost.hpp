#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "dsgda/solver.hpp"

namespace dsgda {

/// Opponent extrapolation carried between rounds.
struct GhostState {
  /// Round-start point of the previous round (empty in round 1).
  std::optional<JointPoint> prev_x0;
  /// (Delta_u, Delta_v) = (x0^r - x0^{r-1}) / K; zero in round 1.
  JointPoint increment;
  /// Last ghost values (u~_K, v~_K) reached in the round.
  JointPoint ghost;
};

/// Decoupled round where each player steps against a linearly extrapolated
/// opponent: v~_{t+1} = v~_t + Delta_v with v~_0 = v_0 (same for u~), then
/// u_{t+1} = u_t - gamma (alpha_u P_u)^{-1} grad_u f(u_t, v~_{t+1}) and
/// v_{t+1} = v_t + gamma (alpha_v P_v)^{-1} grad_v f(u~_{t+1}, v_t).
/// The ghost is deterministic; noise only enters the gradients.
std::pair<JointPoint, GhostState> ghost_round(const TwoPlayerGame& game, const JointPoint& x0,
                                              const std::optional<JointPoint>& prev_x0, double gamma, int K,
                                              const NormSpec& ns, const StepNoise& noise = {},
                                              std::vector<JointPoint>* steps = nullptr);

/// Ghost value after `t` steps from `start` with per-step increment `delta`.
Vector ghost_value(const Eigen::Ref<const Vector>& start, const Eigen::Ref<const Vector>& delta, int t);

}  // namespace dsgda
