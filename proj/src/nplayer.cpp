#include "dsgda/nplayer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace dsgda {

QuadraticNPlayerGame::QuadraticNPlayerGame(std::vector<Matrix> own, std::vector<std::vector<Matrix>> cross)
    : own_(std::move(own)), cross_(std::move(cross)) {
  const std::size_t N = own_.size();
  if (N == 0) throw InvalidArgument("QuadraticNPlayerGame: need at least one player");
  if (cross_.size() != N) throw DimensionError("QuadraticNPlayerGame: cross matrices must have one row per player");
  for (std::size_t n = 0; n < N; ++n) {
    const Matrix& A = own_[n];
    if (A.rows() != A.cols() || A.rows() == 0) {
      throw DimensionError("QuadraticNPlayerGame: own matrix of player " + std::to_string(n) + " must be square");
    }
    if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, A.cwiseAbs().maxCoeff())) {
      throw InvalidArgument("QuadraticNPlayerGame: own matrix of player " + std::to_string(n) + " is not symmetric");
    }
    const double lo = Eigen::SelfAdjointEigenSolver<Matrix>(A, Eigen::EigenvaluesOnly).eigenvalues()(0);
    if (!(lo > 0.0)) {
      throw InvalidArgument("QuadraticNPlayerGame: own matrix of player " + std::to_string(n) +
                            " is not positive definite (smallest eigenvalue " + std::to_string(lo) + ")");
    }
    dims_.push_back(A.rows());
  }
  for (std::size_t n = 0; n < N; ++n) {
    if (cross_[n].size() != N) {
      throw DimensionError("QuadraticNPlayerGame: cross row " + std::to_string(n) + " has wrong length");
    }
    for (std::size_t j = 0; j < N; ++j) {
      Matrix& C = cross_[n][j];
      if (j == n) {
        C = Matrix::Zero(dims_[n], dims_[n]);
        continue;
      }
      if (C.size() == 0) C = Matrix::Zero(dims_[n], dims_[j]);
      if (C.rows() != dims_[n] || C.cols() != dims_[j]) {
        throw DimensionError("QuadraticNPlayerGame: C_" + std::to_string(n) + std::to_string(j) +
                             " has shape " + std::to_string(C.rows()) + "x" + std::to_string(C.cols()));
      }
    }
  }
}

void QuadraticNPlayerGame::own_gradient(std::size_t n, const JointPoint& x, OutRef out) const {
  out.noalias() = own_[n] * x.block(n);
  for (std::size_t j = 0; j < dims_.size(); ++j) {
    if (j != n) out.noalias() += cross_[n][j] * x.block(j);
  }
}

Matrix QuadraticNPlayerGame::jacobian() const {
  Index d = 0;
  for (Index k : dims_) d += k;
  Matrix J = Matrix::Zero(d, d);
  Index row = 0;
  for (std::size_t n = 0; n < dims_.size(); ++n) {
    Index col = 0;
    for (std::size_t j = 0; j < dims_.size(); ++j) {
      J.block(row, col, dims_[n], dims_[j]) = j == n ? own_[n] : cross_[n][j];
      col += dims_[j];
    }
    row += dims_[n];
  }
  return J;
}

void MinimaxAsNPlayer::own_gradient(std::size_t n, const JointPoint& x, OutRef out) const {
  if (n == 0) {
    game_->grad_u(x.u(), x.v(), out);
  } else {
    game_->grad_v(x.u(), x.v(), out);
    out = -out;
  }
}

JointPoint nplayer_operator_F_bar(const NPlayerGame& g, const JointPoint& x, const JointPoint& x_ref) {
  g.require_fits(x, "nplayer_operator_F_bar");
  g.require_fits(x_ref, "nplayer_operator_F_bar reference");
  JointPoint out(g.block_dims());
  JointPoint y = x_ref;
  for (std::size_t n = 0; n < g.num_players(); ++n) {
    y.block(n) = x.block(n);
    g.own_gradient(n, y, out.block(n));
    y.block(n) = x_ref.block(n);
  }
  return out;
}

JointPoint nplayer_operator_F(const NPlayerGame& g, const JointPoint& x) {
  return nplayer_operator_F_bar(g, x, x);
}

namespace {

void add_nplayer_noise(JointPoint& grad, std::size_t n, std::size_t N, const StepNoise& noise,
                       std::uint64_t call, const NormSpec& ns) {
  if (!noise.active()) return;
  if (noise.source == NoiseSource::DecoupledOracle) {
    noise.model->perturb_block(grad, n, noise.model->levels().bar, ns, true, call, n, N);
  } else {
    noise.model->perturb_block(grad, n, noise.model->own_sigma(n, N), ns, false, call, n, N);
  }
}

RoundRecord nplayer_record(const NPlayerGame& g, const NormSpec& ns, const std::optional<JointPoint>& star,
                           int round, const JointPoint& x, long long calls) {
  RoundRecord rec;
  rec.round = round;
  rec.point = x;
  if (star) rec.dist_sq = ns.primal_norm_sq(x - *star);
  rec.grad_norm = ns.dual_norm(nplayer_operator_F(g, x));
  rec.comm_rounds = round;
  rec.oracle_calls = calls;
  return rec;
}

}  // namespace

RunTrace decoupled_sgd_run(const NPlayerGame& g, const RunConfig& cfg) {
  if (cfg.method != Method::Decoupled) {
    throw Unsupported(std::string("decoupled_sgd_run: method ") + method_name(cfg.method) +
                      " is not available for N-player games");
  }
  if (!(cfg.gamma > 0.0)) throw InvalidArgument("decoupled_sgd_run: gamma must be positive");
  if (cfg.K < 1 || cfg.R < 1) throw InvalidArgument("decoupled_sgd_run: need K >= 1 and R >= 1");
  if (cfg.init.num_blocks() == 0) throw InvalidArgument("decoupled_sgd_run: init point is required");
  g.require_fits(cfg.init, "decoupled_sgd_run init");
  const NormSpec ns = resolve_norm(cfg.norm_spec, g.block_dims());
  const std::size_t N = g.num_players();
  const std::optional<JointPoint> star = g.equilibrium();
  const StopMetric metric = cfg.stop ? cfg.stop->metric : (star ? StopMetric::Distance : StopMetric::GradNorm);
  if (metric == StopMetric::Distance && !star) {
    throw InvalidArgument("decoupled_sgd_run: distance metric needs a known equilibrium");
  }
  auto metric_of = [&](const RoundRecord& r) { return metric == StopMetric::Distance ? std::sqrt(*r.dist_sq) : r.grad_norm; };

  std::optional<NoiseModel> noise;
  if (cfg.noise) noise = cfg.noise->with_seed(cfg.seed);
  const StepNoise step_noise{noise ? &*noise : nullptr, cfg.noise_source, 0};

  RunTrace trace;
  trace.method = method_name(cfg.method);
  trace.K = cfg.K;
  trace.gamma = cfg.gamma;
  trace.seed = cfg.seed;

  JointPoint x = cfg.init;
  long long calls = 0;
  std::uint64_t call = 0;
  trace.rounds.push_back(nplayer_record(g, ns, star, 0, x, calls));
  if (cfg.record_steps) trace.steps.push_back({0, 0, x});
  const double initial_metric = metric_of(trace.rounds[0]);
  if (cfg.stop && initial_metric <= cfg.stop->epsilon) {
    trace.status = RunStatus::Converged;
    return trace;
  }

  JointPoint grad(g.block_dims());
  for (int r = 1; r <= cfg.R; ++r) {
    const JointPoint x0 = x;
    JointPoint y = x0;
    for (int t = 0; t < cfg.K; ++t, ++call) {
      for (std::size_t n = 0; n < N; ++n) {
        y.block(n) = x.block(n);
        g.own_gradient(n, y, grad.block(n));
        y.block(n) = x0.block(n);
      }
      for (std::size_t n = 0; n < N; ++n) {
        add_nplayer_noise(grad, n, N, step_noise, call, ns);
        ns.apply_inverse_block(n, grad.block(n));
      }
      x -= cfg.gamma * grad;
      if (!x.all_finite()) {
        throw DivergenceError("decoupled_sgd_run: non-finite iterate (round " + std::to_string(r) + ", step " +
                                  std::to_string(t + 1) + ")",
                              r, t + 1, std::move(trace));
      }
      if (cfg.record_steps) trace.steps.push_back({r, t + 1, x});
    }
    calls += static_cast<long long>(cfg.K) * static_cast<long long>(N);
    trace.rounds.push_back(nplayer_record(g, ns, star, r, x, calls));
    const double m = metric_of(trace.rounds.back());
    if (cfg.blowup && m > *cfg.blowup * std::max(initial_metric, std::numeric_limits<double>::min())) {
      throw DivergenceError("decoupled_sgd_run: metric exceeded blow-up threshold (round " + std::to_string(r) + ")",
                            r, cfg.K, std::move(trace));
    }
    if (cfg.stop && m <= cfg.stop->epsilon) {
      trace.status = RunStatus::Converged;
      return trace;
    }
  }
  trace.status = RunStatus::BudgetExhausted;
  return trace;
}

NPlayerConstants nplayer_constants(const QuadraticNPlayerGame& g, const NormSpec& ns) {
  const std::vector<Index> dims = g.block_dims();
  if (ns.block_dims() != dims) throw DimensionError("nplayer_constants: norm spec blocks do not match the game");
  const std::size_t N = dims.size();
  NPlayerConstants out;
  out.mu_bar = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < N; ++n) {
    const Matrix S = ns.inv_sqrt_block(n) * g.own(n) * ns.inv_sqrt_block(n);
    const double mu = Eigen::SelfAdjointEigenSolver<Matrix>(S, Eigen::EigenvaluesOnly).eigenvalues()(0);
    out.mu.push_back(mu);
    out.mu_bar = std::min(out.mu_bar, mu / ns.alpha(n));

    Index width = 0;
    for (std::size_t j = 0; j < N; ++j) width += j == n ? 0 : dims[j];
    double cross = 0.0;
    if (width > 0) {
      Matrix row(dims[n], width);
      Index col = 0;
      for (std::size_t j = 0; j < N; ++j) {
        if (j == n) continue;
        row.middleCols(col, dims[j]) =
            ns.inv_sqrt_block(n) * g.cross(n, j) * ns.inv_sqrt_block(j) / std::sqrt(ns.alpha(j));
        col += dims[j];
      }
      cross = Eigen::JacobiSVD<Matrix>(row).singularValues()(0);
    }
    out.cross_L.push_back(cross);
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
      if (j != i) sum += out.cross_L[j] * out.cross_L[j] / ns.alpha(j);
    }
    worst = std::max(worst, sum);
  }
  out.L_c = std::sqrt(worst);
  out.kappa_c = out.L_c / out.mu_bar;
  return out;
}

}  // namespace dsgda
