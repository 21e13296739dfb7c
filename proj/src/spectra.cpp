#include "dsgda/spectra.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "dsgda/error.hpp"

namespace dsgda {
namespace {

Vector sym_eigenvalues(const Matrix& M) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (M + M.transpose()), Eigen::EigenvaluesOnly).eigenvalues();
}

double sigma_max(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Matrix>(M).singularValues()(0);
}

}  // namespace

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::FullyDecoupled: return "fully_decoupled";
    case Regime::WeaklyCoupled: return "weakly_coupled";
    case Regime::General: return "general";
  }
  return "unknown";
}

SpectralConstants analyze(const QuadraticGame& game) {
  return analyze(game, NormSpec::identity(game.block_dims()));
}

SpectralConstants analyze(const QuadraticGame& game, const NormSpec& ns) {
  if (ns.num_blocks() != 2 || ns.block_dims() != game.block_dims()) {
    throw DimensionError("analyze: norm spec blocks do not match the game");
  }
  SpectralConstants s;
  s.alpha_u = ns.alpha(0);
  s.alpha_v = ns.alpha(1);

  const Matrix& Pu = ns.inv_sqrt_block(0);
  const Matrix& Pv = ns.inv_sqrt_block(1);
  const Vector eu = sym_eigenvalues(Pu * game.A() * Pu);
  const Vector ev = sym_eigenvalues(Pv * game.B() * Pv);
  s.mu_u = eu(0);
  s.L_u = eu(eu.size() - 1);
  s.mu_v = ev(0);
  s.L_v = ev(ev.size() - 1);
  s.L_uv = sigma_max(Pu * game.C() * Pv);
  s.L_vu = s.L_uv;

  s.mu_bar = std::min(s.mu_u / s.alpha_u, s.mu_v / s.alpha_v);
  s.L_bar = std::max(s.L_u / s.alpha_u, s.L_v / s.alpha_v);
  s.L_c = std::max(s.L_uv, s.L_vu) / std::sqrt(s.alpha_u * s.alpha_v);

  const Index du = game.dim_u(), dv = game.dim_v();
  const Matrix Pinv = ns.full_inv_sqrt();
  const Matrix J = Pinv * game.jacobian() * Pinv;
  s.L = sigma_max(J);
  s.mu = sym_eigenvalues(J)(0);

  Matrix diag = Matrix::Zero(du + dv, du + dv);
  diag.topLeftCorner(du, du) = game.A();
  diag.bottomRightCorner(dv, dv) = game.B();
  const Vector ed = sym_eigenvalues(Pinv * diag * Pinv);
  s.mu_bar_transform = ed(0);
  s.L_bar_transform = ed(ed.size() - 1);
  Matrix G = Matrix::Zero(du + dv, du + dv);
  G.topRightCorner(du, dv) = game.C();
  G.bottomLeftCorner(dv, du) = -game.C().transpose();
  s.L_c_transform = sigma_max(Pinv * G * Pinv);

  const bool decoupled = s.L_uv <= kDecoupledTolerance;
  s.kappa_u = s.L_u / s.mu_u;
  s.kappa_v = s.L_v / s.mu_v;
  s.kappa_uv = s.L_uv / std::sqrt(s.mu_u * s.mu_v);
  s.kappa = s.L / s.mu;
  s.kappa_c = decoupled ? 0.0 : s.L_c / s.mu_bar;
  s.kappa_c_quadratic = decoupled ? 0.0 : s.L_uv * std::max(1.0 / s.mu_u, 1.0 / s.mu_v);
  return s;
}

RegimeReport classify(const SpectralConstants& c) {
  RegimeReport r;
  r.constants = c;
  if (c.kappa_c <= kDecoupledTolerance) {
    r.regime = Regime::FullyDecoupled;
  } else if (c.kappa_c <= 0.25) {
    r.regime = Regime::WeaklyCoupled;
  } else {
    r.regime = Regime::General;
  }
  const double prod = c.kappa_u * c.kappa_v;
  r.foam_condition_holds = prod > 0.0 && c.kappa_c <= 0.5 * std::sqrt(std::max(0.0, 1.0 - 1.0 / std::sqrt(prod)));
  r.quadratic_weakly_coupled = c.kappa_c_quadratic <= 0.5;
  return r;
}

double power_spectral_norm(const Matrix& M, double tol, int max_iter) {
  if (M.size() == 0) return 0.0;
  const Matrix G = M.transpose() * M;
  Vector x = Vector::Ones(G.cols()) / std::sqrt(static_cast<double>(G.cols()));
  // Perturb the start so it is not orthogonal to the top eigenvector by symmetry.
  for (Index i = 0; i < x.size(); ++i) x[i] += 1e-3 * static_cast<double>(i + 1) / static_cast<double>(x.size());
  x.normalize();
  double lambda = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vector y = G * x;
    const double n = y.norm();
    if (n == 0.0) return 0.0;
    y /= n;
    const double next = y.dot(G * y);
    const bool done = std::abs(next - lambda) <= tol * std::max(1.0, std::abs(next)) && (y - x).norm() < 1e-9;
    lambda = next;
    x = y;
    if (done) break;
  }
  return std::sqrt(std::max(0.0, lambda));
}

BoundResult theoretical_bound(const SpectralConstants& c, int R, int K, double gamma, double D,
                              double sigma_bar, std::optional<BoundBranch> force) {
  if (R < 0 || K < 1) throw InvalidArgument("theoretical_bound: need R >= 0 and K >= 1");
  if (!(gamma > 0.0)) throw InvalidArgument("theoretical_bound: gamma must be positive");
  if (D < 0.0 || sigma_bar < 0.0) throw InvalidArgument("theoretical_bound: D and sigma_bar must be non-negative");

  BoundResult out;
  out.branch = force.value_or(c.kappa_c <= 0.25 ? BoundBranch::Weakly : BoundBranch::General);
  const double D2 = D * D;
  const double s2 = sigma_bar * sigma_bar;
  if (out.branch == BoundBranch::Weakly) {
    if (c.kappa_c > 0.25) out.violations.push_back("kappa_c > 1/4: not weakly coupled");
    if (gamma > c.mu_bar / (c.L_bar * c.L_bar) * (1.0 + 1e-12)) out.violations.push_back("gamma > mu_bar / L_bar^2");
    if (c.kappa_c > 0.0) {
      const double Kmin = std::log(4.0 / c.kappa_c) / (gamma * c.mu_bar);
      if (static_cast<double>(K) < Kmin * (1.0 - 1e-12)) out.violations.push_back("K < log(4/kappa_c) / (gamma mu_bar)");
    }
    const double gap = 1.0 - 4.0 * c.kappa_c;
    double noise = 0.0;
    if (s2 > 0.0 && c.kappa_c > 0.0) {
      noise = gap > 0.0 ? 8.0 * c.kappa_c * s2 * gamma / (c.mu * gap) : INFINITY;
    }
    out.value = D2 * std::exp(-gap * R) + noise;
  } else {
    const double cap1 = c.mu / (c.L * c.L);
    const double cap2 = c.L_c > 0.0 ? c.mu / (K * c.L * c.L_c) : INFINITY;
    if (gamma > std::min(cap1, cap2) * (1.0 + 1e-12)) out.violations.push_back("gamma > min(mu/L^2, mu/(K L L_c))");
    out.value = D2 * std::exp(-0.5 * gamma * c.mu * K * R) + 2.0 * s2 * gamma / c.mu;
  }
  out.within_hypotheses = out.violations.empty();
  return out;
}

Hyperparams prescribed_hyperparams(const SpectralConstants& c, BoundBranch target, long long K_hint) {
  if (K_hint < 1) throw InvalidArgument("prescribed_hyperparams: K_hint must be >= 1");
  Hyperparams h;
  if (target == BoundBranch::Weakly) {
    h.gamma = c.mu_bar / (c.L_bar * c.L_bar);
    if (c.kappa_c <= kDecoupledTolerance) {
      h.K = K_hint;
      h.fully_decoupled = true;
      h.note = "fully decoupled: any K, one round suffices";
      return h;
    }
    if (c.kappa_c > 0.25) h.note = "kappa_c > 1/4: outside the weakly coupled regime";
    h.K = static_cast<long long>(std::ceil(std::log(4.0 / c.kappa_c) / (h.gamma * c.mu_bar) - 1e-9));
    h.K = std::max<long long>(h.K, 1);
    return h;
  }
  h.K = K_hint;
  const double cap2 = c.L_c > 0.0 ? c.mu / (static_cast<double>(K_hint) * c.L * c.L_c) : INFINITY;
  h.gamma = std::min(c.mu / (c.L * c.L), cap2);
  return h;
}

ComplexityRow complexity_table_row(const SpectralConstants& c, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("complexity_table_row: epsilon must lie in (0, 1)");
  const double lg = std::log(1.0 / epsilon);
  const double root = std::sqrt(c.kappa_u * c.kappa_v);
  ComplexityRow row;
  row.rounds["GDA"] = (c.kappa_u + c.kappa_v + c.kappa_uv * c.kappa_uv) * lg;
  row.rounds["EG"] = (c.kappa_u + c.kappa_v) * lg;
  row.rounds["OGDA"] = (c.kappa_u + c.kappa_v) * lg;
  row.rounds["APPA"] = root * lg * lg * lg;
  row.rounds["FOAM"] = root * lg;
  row.rounds["PEARL-SGD"] = c.kappa * c.kappa * lg;
  const double k2 = c.kappa * c.kappa;
  if (c.kappa_c < 0.25) {
    row.decoupled_weak_branch = true;
    row.rounds["Decoupled"] = std::min(1.0 / (1.0 - 4.0 * c.kappa_c), k2) * lg;
  } else {
    row.rounds["Decoupled"] = k2 * lg;
  }
  row.decoupled_zero_communication = c.kappa_c <= kDecoupledTolerance;
  return row;
}

}  // namespace dsgda
