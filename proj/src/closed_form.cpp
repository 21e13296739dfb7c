#include "dsgda/closed_form.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "dsgda/error.hpp"
#include "dsgda/spectra.hpp"

namespace dsgda {
namespace {

/// Powers of T = I - gamma (alpha P)^{-1} H for SPD H, as
/// P^{-1/2} V diag((1 - gamma lambda/alpha)^k) V' P^{1/2}.
class StepPowers {
 public:
  StepPowers(const Matrix& H, double gamma, double alpha, const Matrix& inv_sqrt, const Matrix& sqrt)
      : inv_sqrt_(inv_sqrt), sqrt_(sqrt) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(inv_sqrt * H * inv_sqrt);
    V_ = es.eigenvectors();
    factors_ = (1.0 - gamma / alpha * es.eigenvalues().array()).matrix();
  }

  Matrix power(long long k) const {
    Vector f(factors_.size());
    for (Index i = 0; i < f.size(); ++i) f[i] = std::pow(factors_[i], static_cast<double>(k));
    return inv_sqrt_ * V_ * f.asDiagonal() * V_.transpose() * sqrt_;
  }

 private:
  Matrix inv_sqrt_, sqrt_, V_;
  Vector factors_;
};

}  // namespace

JointPoint explicit_iterate(const QuadraticGame& game, const JointPoint& x0, double gamma, long long k) {
  return explicit_iterate(game, x0, gamma, k, NormSpec::identity(game.block_dims()));
}

JointPoint explicit_iterate(const QuadraticGame& game, const JointPoint& x0, double gamma, long long k,
                            const NormSpec& ns) {
  if (k < 0) throw InvalidArgument("explicit_iterate: k must be >= 0");
  game.require_fits(x0, "explicit_iterate");
  ns.require_fits(x0, "explicit_iterate");
  if (k == 0) return x0;
  const Vector u0 = x0.u(), v0 = x0.v();
  const Vector u_star = game.A().llt().solve(-(game.C() * v0 + game.linear_u()));
  const Vector v_star = game.B().llt().solve(game.C().transpose() * u0 - game.linear_v());
  const StepPowers Tu(game.A(), gamma, ns.alpha(0), ns.inv_sqrt_block(0), ns.sqrt_block(0));
  const StepPowers Tv(game.B(), gamma, ns.alpha(1), ns.inv_sqrt_block(1), ns.sqrt_block(1));
  return JointPoint::two_player(u_star + Tu.power(k) * (u0 - u_star), v_star + Tv.power(k) * (v0 - v_star));
}

bool within_closed_form_step_range(const QuadraticGame& game, double gamma) {
  const SpectralConstants s = analyze(game);
  return gamma <= std::max(1.0 / s.L_u, 1.0 / s.L_v);
}

RoundMatrix round_matrix(const QuadraticGame& game, double gamma, long long K) {
  return round_matrix(game, gamma, K, NormSpec::identity(game.block_dims()));
}

RoundMatrix round_matrix(const QuadraticGame& game, double gamma, long long K, const NormSpec& ns) {
  if (K < 1) throw InvalidArgument("round_matrix: K must be >= 1");
  if (!(gamma > 0.0)) throw InvalidArgument("round_matrix: gamma must be positive");
  if (ns.num_blocks() != 2 || ns.block_dims() != game.block_dims()) {
    throw DimensionError("round_matrix: norm spec blocks do not match the game");
  }
  const Index du = game.dim_u(), dv = game.dim_v(), d = du + dv;
  const StepPowers Tu(game.A(), gamma, ns.alpha(0), ns.inv_sqrt_block(0), ns.sqrt_block(0));
  const StepPowers Tv(game.B(), gamma, ns.alpha(1), ns.inv_sqrt_block(1), ns.sqrt_block(1));
  const Matrix TuK = Tu.power(K), TvK = Tv.power(K);

  RoundMatrix rm;
  rm.Q = Matrix::Zero(d, d);
  rm.Q.topLeftCorner(du, du) = Tu.power(1);
  rm.Q.bottomRightCorner(dv, dv) = Tv.power(1);
  rm.QK = Matrix::Zero(d, d);
  rm.QK.topLeftCorner(du, du) = TuK;
  rm.QK.bottomRightCorner(dv, dv) = TvK;

  const Matrix Iu = Matrix::Identity(du, du), Iv = Matrix::Identity(dv, dv);
  const Matrix Eu = (Iu - TuK) * game.A().llt().solve(game.C());
  const Matrix Ev = (Iv - TvK) * game.B().llt().solve(game.C().transpose());
  rm.E = Matrix::Zero(d, d);
  rm.E.topRightCorner(du, dv) = -Eu;
  rm.E.bottomLeftCorner(dv, du) = Ev;
  rm.M = rm.QK + rm.E;

  rm.offset = Vector::Zero(d);
  if (game.has_linear_terms()) {
    rm.offset.head(du) = -(Iu - TuK) * game.A().llt().solve(game.linear_u());
    rm.offset.tail(dv) = -(Iv - TvK) * game.B().llt().solve(game.linear_v());
  }

  rm.norm = Eigen::JacobiSVD<Matrix>(ns.full_sqrt() * rm.M * ns.full_inv_sqrt()).singularValues()(0);

  rm.bound_applicable = ns.is_identity();
  const SpectralConstants s = analyze(game);
  const double kd = static_cast<double>(K);
  const double contraction = std::max(std::pow(1.0 - gamma * s.mu_u, kd), std::pow(1.0 - gamma * s.mu_v, kd));
  const double dA = std::pow(1.0 - std::pow(1.0 - gamma * s.L_u, kd), 2) / (s.mu_u * s.mu_u);
  const double dB = std::pow(1.0 - std::pow(1.0 - gamma * s.L_v, kd), 2) / (s.mu_v * s.mu_v);
  rm.norm_bound = contraction + s.L_uv * std::sqrt(std::max(dA, dB));
  return rm;
}

RateBound quadratic_rate_bound(const QuadraticGame& game, double gamma, long long K, int R, double D) {
  if (K < 1 || R < 0) throw InvalidArgument("quadratic_rate_bound: need K >= 1 and R >= 0");
  if (D < 0.0) throw InvalidArgument("quadratic_rate_bound: D must be non-negative");
  const SpectralConstants s = analyze(game);
  const double mu_min = std::min(s.mu_u, s.mu_v);
  const double L_max = std::max(s.L_u, s.L_v);
  RateBound out;
  const double floor = s.L_uv / mu_min;
  out.vacuous = floor >= 1.0;
  out.weakly_coupled = s.kappa_c_quadratic <= 0.5;
  const double kd = static_cast<double>(K);
  const double dA = std::pow(1.0 - std::pow(1.0 - gamma * s.L_u, kd), 2) / (s.mu_u * s.mu_u);
  const double dB = std::pow(1.0 - std::pow(1.0 - gamma * s.L_v, kd), 2) / (s.mu_v * s.mu_v);
  out.within_hypotheses = gamma > 0.0 && gamma <= std::max(1.0 / s.L_u, 1.0 / s.L_v) && dA <= 1.0 && dB <= 1.0;
  out.value = D * std::pow(std::exp(-(mu_min / L_max) * kd) + floor, R);
  return out;
}

}  // namespace dsgda
