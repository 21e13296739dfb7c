#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dsgda/error.hpp"
#include "dsgda/game.hpp"
#include "dsgda/noise.hpp"
#include "dsgda/norm.hpp"

namespace dsgda {

enum class Method { Decoupled, Gda, AltGda, Eg, Ogda, Ghost };

const char* method_name(Method m);
/// Accepts decoupled, gda, alt_gda, eg, ogda, ghost.
Method parse_method(const std::string& name);
bool is_local_method(Method m);
/// Per-player gradient queries per local step or baseline step.
int oracle_calls_per_step(Method m, std::size_t num_players = 2);

/// Which oracle family supplies gradient noise.
///
/// DecoupledOracle: each player's block carries noise with total variance
/// sigma_bar^2 split over the joint dimension. OwnerOracles: player u's block
/// uses sigma_uu, player v's block uses sigma_vv (own-block variances only).
enum class NoiseSource { DecoupledOracle, OwnerOracles };

/// Noise for one update: the model, its source, and the draw counter of the
/// first operator evaluation. Null model means noiseless.
struct StepNoise {
  const NoiseModel* model = nullptr;
  NoiseSource source = NoiseSource::DecoupledOracle;
  std::uint64_t first_call = 0;

  bool active() const { return model != nullptr && !model->is_zero(); }
  StepNoise at(std::uint64_t call) const { return {model, source, call}; }
};

/// Adds the configured noise to block `player` of a two-player gradient.
void add_player_noise(JointPoint& g, std::size_t player, const StepNoise& noise, std::uint64_t call,
                      const NormSpec& ns);

enum class StopMetric { Distance, GradNorm };

struct StopRule {
  StopMetric metric = StopMetric::Distance;
  double epsilon = 1e-6;
};

struct RunConfig {
  Method method = Method::Decoupled;
  double gamma = 0.1;
  /// Local steps per round; ignored (treated as 1) by single-step baselines.
  int K = 1;
  int R = 1;
  /// Empty spec means alpha = 1, P = I.
  NormSpec norm_spec;
  /// Noise draws use (seed, noise->stream_id()); the model's own seed is ignored.
  std::optional<NoiseModel> noise;
  NoiseSource noise_source = NoiseSource::DecoupledOracle;
  JointPoint init;
  std::optional<StopRule> stop;
  std::uint64_t seed = 0;
  /// Abort when the tracked metric exceeds this multiple of its initial value.
  std::optional<double> blowup;
  bool record_steps = false;
};

struct RoundRecord {
  int round = 0;
  JointPoint point;
  std::optional<double> dist_sq;
  double grad_norm = 0.0;
  long long comm_rounds = 0;
  long long oracle_calls = 0;
};

struct StepRecord {
  int round = 0;
  int step = 0;
  JointPoint point;
};

enum class RunStatus { Converged, BudgetExhausted };

const char* status_name(RunStatus s);

struct RunTrace {
  std::string method;
  int K = 1;
  double gamma = 0.0;
  std::uint64_t seed = 0;
  /// Number of clients per player; zero outside the federated module.
  int clients = 0;
  /// Round 0 is the initial point.
  std::vector<RoundRecord> rounds;
  std::vector<StepRecord> steps;
  RunStatus status = RunStatus::BudgetExhausted;

  const RoundRecord& last() const { return rounds.back(); }
  int executed_rounds() const { return rounds.empty() ? 0 : rounds.back().round; }
  /// First round with distance (not squared) at most eps.
  std::optional<int> rounds_to_distance(double eps) const;
  double min_grad_norm() const;
};

/// Non-finite iterate or blow-up. Carries everything computed before it.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, int round, int step, RunTrace partial = {})
      : Error(what), round_(round), step_(step), partial_(std::move(partial)) {}
  const char* kind() const noexcept override { return "divergence"; }
  int round() const { return round_; }
  int step() const { return step_; }
  const RunTrace& partial_trace() const { return partial_; }
  void set_partial_trace(RunTrace t) { partial_ = std::move(t); }

 private:
  int round_;
  int step_;
  RunTrace partial_;
};

/// K local steps of each player against the opponent's round-start block.
///
/// u_{t+1} = u_t - gamma (alpha_u P_u)^{-1} grad_u f(u_t, v_0),
/// v_{t+1} = v_t + gamma (alpha_v P_v)^{-1} grad_v f(u_0, v_t).
/// Step t draws noise with call index noise.first_call + t. Throws
/// DivergenceError (round 0) on a non-finite iterate.
JointPoint decoupled_round(const TwoPlayerGame& game, const JointPoint& x0, double gamma, int K,
                           const NormSpec& ns, const StepNoise& noise = {},
                           std::vector<JointPoint>* steps = nullptr);

struct BaselineState {
  /// Operator value of the previous step (optimistic GDA).
  std::optional<JointPoint> prev_operator;
};

/// One step of a single-step baseline. Extragradient uses calls first_call
/// and first_call + 1; the others use first_call.
JointPoint baseline_step(const TwoPlayerGame& game, const JointPoint& x, double gamma, Method method,
                         const NormSpec& ns, BaselineState& state, const StepNoise& noise = {});

/// Operator evaluations per baseline step (extragradient 2, others 1).
int evaluations_per_step(Method m);

/// Runs rounds until R or the stop rule fires.
RunTrace run(const TwoPlayerGame& game, const RunConfig& cfg);

/// Resolves an empty NormSpec to the identity geometry of `dims`.
NormSpec resolve_norm(const NormSpec& ns, const std::vector<Index>& dims);

}  // namespace dsgda
