#include "dsgda/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dsgda/ghost.hpp"

namespace dsgda {

const char* method_name(Method m) {
  switch (m) {
    case Method::Decoupled: return "decoupled";
    case Method::Gda: return "gda";
    case Method::AltGda: return "alt_gda";
    case Method::Eg: return "eg";
    case Method::Ogda: return "ogda";
    case Method::Ghost: return "ghost";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  for (Method m : {Method::Decoupled, Method::Gda, Method::AltGda, Method::Eg, Method::Ogda, Method::Ghost}) {
    if (name == method_name(m)) return m;
  }
  throw InvalidArgument("unknown method '" + name + "'");
}

bool is_local_method(Method m) { return m == Method::Decoupled || m == Method::Ghost; }

int evaluations_per_step(Method m) { return m == Method::Eg ? 2 : 1; }

int oracle_calls_per_step(Method m, std::size_t num_players) {
  return evaluations_per_step(m) * static_cast<int>(num_players);
}

const char* status_name(RunStatus s) {
  return s == RunStatus::Converged ? "converged" : "budget_exhausted";
}

std::optional<int> RunTrace::rounds_to_distance(double eps) const {
  for (const auto& r : rounds) {
    if (r.dist_sq && std::sqrt(*r.dist_sq) <= eps) return r.round;
  }
  return std::nullopt;
}

double RunTrace::min_grad_norm() const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : rounds) best = std::min(best, r.grad_norm);
  return best;
}

void add_player_noise(JointPoint& g, std::size_t player, const StepNoise& noise, std::uint64_t call,
                      const NormSpec& ns) {
  if (!noise.active()) return;
  const NoiseLevels& s = noise.model->levels();
  if (noise.source == NoiseSource::DecoupledOracle) {
    noise.model->perturb_block(g, player, s.bar, ns, true, call, player, 2);
  } else {
    noise.model->perturb_block(g, player, player == 0 ? s.uu : s.vv, ns, false, call, player, 2);
  }
}

NormSpec resolve_norm(const NormSpec& ns, const std::vector<Index>& dims) {
  if (ns.num_blocks() == 0) return NormSpec::identity(dims);
  if (ns.block_dims() != dims) throw DimensionError("norm spec blocks do not match the game dimensions");
  return ns;
}

JointPoint decoupled_round(const TwoPlayerGame& game, const JointPoint& x0, double gamma, int K,
                           const NormSpec& ns, const StepNoise& noise, std::vector<JointPoint>* steps) {
  if (K < 1) throw InvalidArgument("decoupled_round: K must be >= 1");
  if (!(gamma > 0.0)) throw InvalidArgument("decoupled_round: gamma must be positive");
  game.require_fits(x0, "decoupled_round");
  ns.require_fits(x0, "decoupled_round");

  JointPoint x = x0;
  JointPoint g(game.block_dims());
  for (int t = 0; t < K; ++t) {
    game.grad_u(x.u(), x0.v(), g.u());
    game.grad_v(x0.u(), x.v(), g.v());
    g.v() = -g.v();
    if (noise.active()) {
      const std::uint64_t call = noise.first_call + static_cast<std::uint64_t>(t);
      add_player_noise(g, 0, noise, call, ns);
      add_player_noise(g, 1, noise, call, ns);
    }
    for (std::size_t b = 0; b < 2; ++b) ns.apply_inverse_block(b, g.block(b));
    x -= gamma * g;
    if (!x.all_finite()) throw DivergenceError("decoupled_round: non-finite iterate", 0, t + 1);
    if (steps) steps->push_back(x);
  }
  return x;
}

namespace {

JointPoint noisy_operator(const TwoPlayerGame& game, const JointPoint& x, const NormSpec& ns,
                          const StepNoise& noise, std::uint64_t call) {
  JointPoint g = operator_F(game, x);
  add_player_noise(g, 0, noise, call, ns);
  add_player_noise(g, 1, noise, call, ns);
  return g;
}

JointPoint preconditioned(JointPoint g, const NormSpec& ns) {
  for (std::size_t b = 0; b < g.num_blocks(); ++b) ns.apply_inverse_block(b, g.block(b));
  return g;
}

}  // namespace

JointPoint baseline_step(const TwoPlayerGame& game, const JointPoint& x, double gamma, Method method,
                         const NormSpec& ns, BaselineState& state, const StepNoise& noise) {
  if (!(gamma > 0.0)) throw InvalidArgument("baseline_step: gamma must be positive");
  game.require_fits(x, "baseline_step");
  ns.require_fits(x, "baseline_step");
  const std::uint64_t c0 = noise.first_call;
  JointPoint next;
  switch (method) {
    case Method::Gda:
      next = x - gamma * preconditioned(noisy_operator(game, x, ns, noise, c0), ns);
      break;
    case Method::AltGda: {
      next = x;
      JointPoint g(game.block_dims());
      game.grad_u(x.u(), x.v(), g.u());
      add_player_noise(g, 0, noise, c0, ns);
      ns.apply_inverse_block(0, g.u());
      next.u() -= gamma * g.u();
      game.grad_v(next.u(), x.v(), g.v());
      g.v() = -g.v();
      add_player_noise(g, 1, noise, c0, ns);
      ns.apply_inverse_block(1, g.v());
      next.v() -= gamma * g.v();
      break;
    }
    case Method::Eg: {
      const JointPoint half = x - gamma * preconditioned(noisy_operator(game, x, ns, noise, c0), ns);
      next = x - gamma * preconditioned(noisy_operator(game, half, ns, noise, c0 + 1), ns);
      break;
    }
    case Method::Ogda: {
      JointPoint g = noisy_operator(game, x, ns, noise, c0);
      if (state.prev_operator) {
        next = x - gamma * preconditioned(2.0 * g - *state.prev_operator, ns);
      } else {
        next = x - gamma * preconditioned(g, ns);
      }
      state.prev_operator = std::move(g);
      break;
    }
    case Method::Decoupled:
    case Method::Ghost:
      throw InvalidArgument(std::string("baseline_step: ") + method_name(method) + " is not a single-step baseline");
  }
  if (!next.all_finite()) throw DivergenceError("baseline_step: non-finite iterate", 0, 1);
  return next;
}

namespace {

RoundRecord make_record(const TwoPlayerGame& game, const NormSpec& ns, const std::optional<JointPoint>& star,
                        int round, const JointPoint& x, long long calls) {
  RoundRecord rec;
  rec.round = round;
  rec.point = x;
  if (star) rec.dist_sq = ns.primal_norm_sq(x - *star);
  rec.grad_norm = ns.dual_norm(operator_F(game, x));
  rec.comm_rounds = round;
  rec.oracle_calls = calls;
  return rec;
}

double tracked_metric(const RoundRecord& r, StopMetric metric) {
  if (metric == StopMetric::Distance) return std::sqrt(*r.dist_sq);
  return r.grad_norm;
}

}  // namespace

RunTrace run(const TwoPlayerGame& game, const RunConfig& cfg) {
  if (!(cfg.gamma > 0.0) || !std::isfinite(cfg.gamma)) throw InvalidArgument("run: gamma must be positive");
  if (cfg.K < 1) throw InvalidArgument("run: K must be >= 1");
  if (cfg.R < 1) throw InvalidArgument("run: R must be >= 1");
  if (cfg.init.num_blocks() == 0) throw InvalidArgument("run: init point is required");
  game.require_fits(cfg.init, "run init");
  const NormSpec ns = resolve_norm(cfg.norm_spec, game.block_dims());
  const std::optional<JointPoint> star = game.saddle();
  const StopMetric metric = cfg.stop ? cfg.stop->metric : (star ? StopMetric::Distance : StopMetric::GradNorm);
  if (metric == StopMetric::Distance && !star) {
    throw InvalidArgument("run: distance metric needs a game with a known saddle point");
  }

  std::optional<NoiseModel> noise;
  if (cfg.noise) noise = cfg.noise->with_seed(cfg.seed);
  StepNoise step_noise{noise ? &*noise : nullptr, cfg.noise_source, 0};

  const bool local = is_local_method(cfg.method);
  const int K = local ? cfg.K : 1;
  RunTrace trace;
  trace.method = method_name(cfg.method);
  trace.K = K;
  trace.gamma = cfg.gamma;
  trace.seed = cfg.seed;

  long long calls = 0;
  std::uint64_t evals = 0;
  JointPoint x = cfg.init;
  trace.rounds.push_back(make_record(game, ns, star, 0, x, calls));
  if (cfg.record_steps) trace.steps.push_back({0, 0, x});
  const double initial_metric = tracked_metric(trace.rounds[0], metric);
  if (cfg.stop && initial_metric <= cfg.stop->epsilon) {
    trace.status = RunStatus::Converged;
    return trace;
  }

  BaselineState base_state;
  std::optional<JointPoint> prev_x0;
  std::vector<JointPoint> steps;
  for (int r = 1; r <= cfg.R; ++r) {
    steps.clear();
    std::vector<JointPoint>* sink = cfg.record_steps ? &steps : nullptr;
    try {
      if (cfg.method == Method::Decoupled) {
        x = decoupled_round(game, x, cfg.gamma, K, ns, step_noise.at(evals), sink);
        evals += K;
      } else if (cfg.method == Method::Ghost) {
        auto [next, gs] = ghost_round(game, x, prev_x0, cfg.gamma, K, ns, step_noise.at(evals), sink);
        prev_x0 = x;
        x = std::move(next);
        evals += K;
      } else {
        x = baseline_step(game, x, cfg.gamma, cfg.method, ns, base_state, step_noise.at(evals));
        if (sink) sink->push_back(x);
        evals += evaluations_per_step(cfg.method);
      }
    } catch (DivergenceError& e) {
      DivergenceError full(std::string(e.what()) + " (round " + std::to_string(r) + ", step " +
                               std::to_string(e.step()) + ")",
                           r, e.step(), std::move(trace));
      throw full;
    }
    calls += static_cast<long long>(K) * oracle_calls_per_step(cfg.method);
    if (cfg.record_steps) {
      for (std::size_t t = 0; t < steps.size(); ++t) trace.steps.push_back({r, static_cast<int>(t + 1), steps[t]});
    }
    trace.rounds.push_back(make_record(game, ns, star, r, x, calls));
    const double m = tracked_metric(trace.rounds.back(), metric);
    if (!std::isfinite(m)) {
      throw DivergenceError("run: non-finite metric (round " + std::to_string(r) + ")", r, K, std::move(trace));
    }
    if (cfg.blowup && m > *cfg.blowup * std::max(initial_metric, std::numeric_limits<double>::min())) {
      throw DivergenceError("run: metric exceeded blow-up threshold (round " + std::to_string(r) + ")", r, K,
                            std::move(trace));
    }
    if (cfg.stop && m <= cfg.stop->epsilon) {
      trace.status = RunStatus::Converged;
      return trace;
    }
  }
  trace.status = RunStatus::BudgetExhausted;
  return trace;
}

}  // namespace dsgda
