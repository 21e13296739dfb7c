#include "dsgda/federated.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace dsgda {
namespace {

/// f = (1/M) sum f_m for arbitrary clients.
class AveragedGame final : public TwoPlayerGame {
 public:
  AveragedGame(std::vector<std::shared_ptr<const TwoPlayerGame>> clients, std::optional<JointPoint> saddle)
      : clients_(std::move(clients)), saddle_(std::move(saddle)) {}

  Index dim_u() const override { return clients_.front()->dim_u(); }
  Index dim_v() const override { return clients_.front()->dim_v(); }

  double value(const ConstRef& u, const ConstRef& v) const override {
    double s = 0.0;
    for (const auto& c : clients_) s += c->value(u, v);
    return s / static_cast<double>(clients_.size());
  }
  void grad_u(const ConstRef& u, const ConstRef& v, OutRef out) const override {
    Vector tmp(out.size());
    out.setZero();
    for (const auto& c : clients_) {
      c->grad_u(u, v, tmp);
      out += tmp;
    }
    out /= static_cast<double>(clients_.size());
  }
  void grad_v(const ConstRef& u, const ConstRef& v, OutRef out) const override {
    Vector tmp(out.size());
    out.setZero();
    for (const auto& c : clients_) {
      c->grad_v(u, v, tmp);
      out += tmp;
    }
    out /= static_cast<double>(clients_.size());
  }
  std::optional<JointPoint> saddle() const override { return saddle_; }

 private:
  std::vector<std::shared_ptr<const TwoPlayerGame>> clients_;
  std::optional<JointPoint> saddle_;
};

const QuadraticGame* as_quadratic(const TwoPlayerGame& g) { return dynamic_cast<const QuadraticGame*>(&g); }

double spectral_norm(const Matrix& M) { return Eigen::JacobiSVD<Matrix>(M).singularValues()(0); }

double min_eigenvalue(const Matrix& M) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(M, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

RoundRecord euclidean_record(const TwoPlayerGame& global, const std::optional<JointPoint>& star, int round,
                             const JointPoint& x, long long calls) {
  RoundRecord rec;
  rec.round = round;
  rec.point = x;
  if (star) rec.dist_sq = (x - *star).flat().squaredNorm();
  rec.grad_norm = operator_F(global, x).flat().norm();
  rec.comm_rounds = round;
  rec.oracle_calls = calls;
  return rec;
}

bool stop_reached(const std::optional<StopRule>& stop, const RoundRecord& rec) {
  if (!stop) return false;
  if (stop->metric == StopMetric::Distance) return rec.dist_sq && std::sqrt(*rec.dist_sq) <= stop->epsilon;
  return rec.grad_norm <= stop->epsilon;
}

void validate(const FederatedRunConfig& cfg, const FederatedProblem& p, const char* what) {
  if (!(cfg.gamma > 0.0)) throw InvalidArgument(std::string(what) + ": gamma must be positive");
  if (cfg.K < 1 || cfg.R < 1) throw InvalidArgument(std::string(what) + ": need K >= 1 and R >= 1");
  if (cfg.init.num_blocks() == 0) throw InvalidArgument(std::string(what) + ": init point is required");
  cfg.init.require_layout(p.block_dims(), what);
}

}  // namespace

FederatedProblem::FederatedProblem(std::vector<std::shared_ptr<const TwoPlayerGame>> clients, double sigma,
                                   std::uint64_t stream_id)
    : clients_(std::move(clients)), sigma_(sigma), stream_id_(stream_id) {
  if (clients_.empty()) throw InvalidArgument("FederatedProblem: need at least one client");
  if (!(sigma_ >= 0.0)) throw InvalidArgument("FederatedProblem: sigma must be non-negative");
  const auto dims = clients_.front()->block_dims();
  for (std::size_t m = 0; m < clients_.size(); ++m) {
    if (!clients_[m]) throw InvalidArgument("FederatedProblem: null client " + std::to_string(m));
    if (clients_[m]->block_dims() != dims) {
      throw DimensionError("FederatedProblem: client " + std::to_string(m) + " has dimensions (" +
                           std::to_string(clients_[m]->dim_u()) + ", " + std::to_string(clients_[m]->dim_v()) +
                           "), expected (" + std::to_string(dims[0]) + ", " + std::to_string(dims[1]) + ")");
    }
  }
  if (all_quadratic()) {
    global_ = std::make_shared<QuadraticGame>(averaged_quadratic());
  } else {
    global_ = std::make_shared<AveragedGame>(clients_, std::nullopt);
  }
}

bool FederatedProblem::all_quadratic() const {
  for (const auto& c : clients_) {
    if (!as_quadratic(*c)) return false;
  }
  return true;
}

QuadraticGame FederatedProblem::averaged_quadratic() const {
  if (!all_quadratic()) throw Unsupported("FederatedProblem: averaged game needs quadratic clients");
  const auto& q0 = *as_quadratic(*clients_.front());
  Matrix A = Matrix::Zero(q0.dim_u(), q0.dim_u()), B = Matrix::Zero(q0.dim_v(), q0.dim_v());
  Matrix C = Matrix::Zero(q0.dim_u(), q0.dim_v());
  Vector bu = Vector::Zero(q0.dim_u()), bv = Vector::Zero(q0.dim_v());
  for (const auto& c : clients_) {
    const auto& q = *as_quadratic(*c);
    A += q.A();
    B += q.B();
    C += q.C();
    bu += q.linear_u();
    bv += q.linear_v();
  }
  const double inv = 1.0 / static_cast<double>(clients_.size());
  return QuadraticGame(A * inv, B * inv, C * inv, bu * inv, bv * inv);
}

RunTrace two_oracle_local_sgda(const TwoPlayerGame& game, const RunConfig& cfg) {
  if (!(cfg.gamma > 0.0)) throw InvalidArgument("two_oracle_local_sgda: gamma must be positive");
  if (cfg.K < 1 || cfg.R < 1) throw InvalidArgument("two_oracle_local_sgda: need K >= 1 and R >= 1");
  if (cfg.init.num_blocks() == 0) throw InvalidArgument("two_oracle_local_sgda: init point is required");
  game.require_fits(cfg.init, "two_oracle_local_sgda init");
  const NormSpec ns = resolve_norm(cfg.norm_spec, game.block_dims());
  const std::optional<JointPoint> star = game.saddle();
  const NoiseModel noise = cfg.noise ? cfg.noise->with_seed(cfg.seed) : NoiseModel();

  RunTrace trace;
  trace.method = "local_sgda";
  trace.K = cfg.K;
  trace.gamma = cfg.gamma;
  trace.seed = cfg.seed;

  auto record = [&](int r, const JointPoint& x, long long calls) {
    RoundRecord rec;
    rec.round = r;
    rec.point = x;
    if (star) rec.dist_sq = ns.primal_norm_sq(x - *star);
    rec.grad_norm = ns.dual_norm(operator_F(game, x));
    rec.comm_rounds = r;
    rec.oracle_calls = calls;
    return rec;
  };

  JointPoint x = cfg.init;
  long long calls = 0;
  std::uint64_t call = 0;
  trace.rounds.push_back(record(0, x, calls));
  if (stop_reached(cfg.stop, trace.rounds.back())) {
    trace.status = RunStatus::Converged;
    return trace;
  }
  for (int r = 1; r <= cfg.R; ++r) {
    JointPoint xu = x, xv = x;
    for (int t = 0; t < cfg.K; ++t, ++call) {
      JointPoint gu = stochastic_oracle(game, xu, xu, noise, OracleKind::OwnerU, call, ns);
      JointPoint gv = stochastic_oracle(game, xv, xv, noise, OracleKind::OwnerV, call, ns);
      xu -= cfg.gamma * ns.apply_inverse(gu);
      xv -= cfg.gamma * ns.apply_inverse(gv);
      if (!xu.all_finite() || !xv.all_finite()) {
        throw DivergenceError("two_oracle_local_sgda: non-finite iterate (round " + std::to_string(r) + ", step " +
                                  std::to_string(t + 1) + ")",
                              r, t + 1, std::move(trace));
      }
    }
    x = 0.5 * (xu + xv);
    calls += 2LL * cfg.K;
    trace.rounds.push_back(record(r, x, calls));
    if (cfg.record_steps) trace.steps.push_back({r, cfg.K, x});
    if (stop_reached(cfg.stop, trace.rounds.back())) {
      trace.status = RunStatus::Converged;
      return trace;
    }
  }
  trace.status = RunStatus::BudgetExhausted;
  return trace;
}

RunTrace federated_decoupled_run(const FederatedProblem& p, const FederatedRunConfig& cfg) {
  validate(cfg, p, "federated_decoupled_run");
  const std::size_t M = p.num_clients();
  const NormSpec ns = NormSpec::identity(p.block_dims());
  const std::optional<JointPoint> star = p.global().saddle();
  NoiseLevels lv;
  lv.uu = lv.vv = p.sigma();
  const NoiseModel base(lv, cfg.seed, p.stream_id());

  RunTrace trace;
  trace.method = "federated_decoupled";
  trace.K = cfg.K;
  trace.gamma = cfg.gamma;
  trace.seed = cfg.seed;
  trace.clients = static_cast<int>(M);

  JointPoint x = cfg.init;
  long long calls = 0;
  trace.rounds.push_back(euclidean_record(p.global(), star, 0, x, calls));
  if (stop_reached(cfg.stop, trace.rounds.back())) {
    trace.status = RunStatus::Converged;
    return trace;
  }
  std::vector<NoiseModel> client_noise;
  for (std::size_t m = 0; m < M; ++m) client_noise.push_back(base.with_stream(p.stream_id() + m));

  for (int r = 1; r <= cfg.R; ++r) {
    JointPoint sum(p.block_dims());
    const std::uint64_t first_call = static_cast<std::uint64_t>(r - 1) * static_cast<std::uint64_t>(cfg.K);
    for (std::size_t m = 0; m < M; ++m) {
      const StepNoise sn{&client_noise[m], NoiseSource::OwnerOracles, first_call};
      try {
        sum += decoupled_round(p.client(m), x, cfg.gamma, cfg.K, ns, sn);
      } catch (DivergenceError& e) {
        throw DivergenceError("federated_decoupled_run: non-finite iterate at client " + std::to_string(m) +
                                  " (round " + std::to_string(r) + ", step " + std::to_string(e.step()) + ")",
                              r, e.step(), std::move(trace));
      }
    }
    x = (1.0 / static_cast<double>(M)) * sum;
    calls += 2LL * static_cast<long long>(M) * cfg.K;
    trace.rounds.push_back(euclidean_record(p.global(), star, r, x, calls));
    if (cfg.record_steps) trace.steps.push_back({r, cfg.K, x});
    if (stop_reached(cfg.stop, trace.rounds.back())) {
      trace.status = RunStatus::Converged;
      return trace;
    }
  }
  trace.status = RunStatus::BudgetExhausted;
  return trace;
}

RunTrace local_sgda_mclient(const FederatedProblem& p, const FederatedRunConfig& cfg) {
  validate(cfg, p, "local_sgda_mclient");
  const std::size_t M = p.num_clients();
  const NormSpec ns = NormSpec::identity(p.block_dims());
  const std::optional<JointPoint> star = p.global().saddle();
  NoiseLevels lv;
  lv.uu = lv.vv = p.sigma();
  const NoiseModel base(lv, cfg.seed, p.stream_id());

  RunTrace trace;
  trace.method = "local_sgda_mclient";
  trace.K = cfg.K;
  trace.gamma = cfg.gamma;
  trace.seed = cfg.seed;
  trace.clients = static_cast<int>(M);

  JointPoint x = cfg.init;
  long long calls = 0;
  trace.rounds.push_back(euclidean_record(p.global(), star, 0, x, calls));
  if (stop_reached(cfg.stop, trace.rounds.back())) {
    trace.status = RunStatus::Converged;
    return trace;
  }
  std::vector<NoiseModel> client_noise;
  for (std::size_t m = 0; m < M; ++m) client_noise.push_back(base.with_stream(p.stream_id() + m));

  for (int r = 1; r <= cfg.R; ++r) {
    JointPoint sum(p.block_dims());
    const std::uint64_t first_call = static_cast<std::uint64_t>(r - 1) * static_cast<std::uint64_t>(cfg.K);
    for (std::size_t m = 0; m < M; ++m) {
      const StepNoise sn{&client_noise[m], NoiseSource::OwnerOracles, first_call};
      BaselineState state;
      JointPoint xm = x;
      try {
        for (int t = 0; t < cfg.K; ++t) xm = baseline_step(p.client(m), xm, cfg.gamma, Method::Gda, ns, state, sn.at(first_call + t));
      } catch (DivergenceError& e) {
        throw DivergenceError("local_sgda_mclient: non-finite iterate at client " + std::to_string(m) + " (round " +
                                  std::to_string(r) + ")",
                              r, e.step(), std::move(trace));
      }
      sum += xm;
    }
    x = (1.0 / static_cast<double>(M)) * sum;
    calls += 2LL * static_cast<long long>(M) * cfg.K;
    trace.rounds.push_back(euclidean_record(p.global(), star, r, x, calls));
    if (cfg.record_steps) trace.steps.push_back({r, cfg.K, x});
    if (stop_reached(cfg.stop, trace.rounds.back())) {
      trace.status = RunStatus::Converged;
      return trace;
    }
  }
  trace.status = RunStatus::BudgetExhausted;
  return trace;
}

double measure_zeta_star(const FederatedProblem& p) {
  if (!p.all_quadratic()) throw Unsupported("measure_zeta_star: clients must be quadratic games");
  const JointPoint star = *p.averaged_quadratic().saddle();
  double zeta = 0.0;
  Vector gu(star.block_dim(0)), gv(star.block_dim(1));
  for (std::size_t m = 0; m < p.num_clients(); ++m) {
    p.client(m).grad_u(star.u(), star.v(), gu);
    p.client(m).grad_v(star.u(), star.v(), gv);
    zeta = std::max({zeta, gu.norm(), gv.norm()});
  }
  return zeta;
}

FederatedConstants federated_constants(const FederatedProblem& p) {
  if (!p.all_quadratic()) throw Unsupported("federated_constants: clients must be quadratic games");
  FederatedConstants c;
  for (std::size_t m = 0; m < p.num_clients(); ++m) {
    const auto& q = *as_quadratic(p.client(m));
    c.L = std::max({c.L, spectral_norm(q.A()), spectral_norm(q.B()), spectral_norm(q.C())});
  }
  const QuadraticGame avg = p.averaged_quadratic();
  c.mu = std::min(min_eigenvalue(avg.A()), min_eigenvalue(avg.B()));
  return c;
}

FederatedRateBound federated_rate_bound(const FederatedConstants& c, double gamma, int K, int R, int M, double D,
                              double sigma, double zeta_star) {
  if (!(gamma > 0.0) || K < 1 || R < 0 || M < 1) {
    throw InvalidArgument("federated_rate_bound: need gamma > 0, K >= 1, R >= 0, M >= 1");
  }
  if (!(c.mu > 0.0) || !(c.L > 0.0)) throw InvalidArgument("federated_rate_bound: need mu > 0 and L > 0");
  FederatedRateBound b;
  const double L2 = c.L * c.L, mu2 = c.mu * c.mu, g2 = gamma * gamma, s2 = sigma * sigma;
  const double Kd = static_cast<double>(K);
  b.exponential_term = D * D * std::exp(-0.5 * gamma * c.mu * Kd * R);
  b.heterogeneity_term = 96.0 * Kd * Kd * L2 * g2 * zeta_star * zeta_star / mu2;
  b.drift_noise_term = 6.0 * Kd * L2 * g2 * s2 / mu2;
  b.averaged_noise_term = 2.0 * gamma * s2 / (static_cast<double>(M) * c.mu);
  b.value = b.exponential_term + b.heterogeneity_term + b.drift_noise_term + b.averaged_noise_term;
  b.within_hypotheses = gamma <= c.mu / (32.0 * L2 * Kd) * (1.0 + 1e-12);
  return b;
}

}  // namespace dsgda
