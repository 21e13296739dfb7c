#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dsgda/game.hpp"
#include "dsgda/norm.hpp"

namespace dsgda {

/// Regime constants of a quadratic game in a given block geometry.
///
/// Per-player constants (mu_u, L_u, ...) are eigenvalues of the
/// P-similarity-transformed blocks without the alpha weights; the operator
/// constants (mu_bar, L_bar, L_c, L, mu) include the weights.
struct SpectralConstants {
  double alpha_u = 1.0;
  double alpha_v = 1.0;

  double mu_u = 0.0;
  double mu_v = 0.0;
  double L_u = 0.0;
  double L_v = 0.0;
  double L_uv = 0.0;
  double L_vu = 0.0;

  double mu_bar = 0.0;
  double L_bar = 0.0;
  double L = 0.0;
  double mu = 0.0;
  double L_c = 0.0;

  double kappa_u = 0.0;
  double kappa_v = 0.0;
  double kappa_uv = 0.0;
  double kappa = 0.0;
  double kappa_c = 0.0;
  /// ||C|| * max(1/mu_u, 1/mu_v); weakly coupled for quadratics when <= 1/2.
  double kappa_c_quadratic = 0.0;

  /// mu_bar, L_bar, L_c recomputed from the transformed block operators.
  double mu_bar_transform = 0.0;
  double L_bar_transform = 0.0;
  double L_c_transform = 0.0;
};

/// Absolute tolerance on ||C|| below which a game counts as fully decoupled.
inline constexpr double kDecoupledTolerance = 1e-12;

enum class Regime { FullyDecoupled, WeaklyCoupled, General };

const char* regime_name(Regime r);

struct RegimeReport {
  SpectralConstants constants;
  Regime regime = Regime::General;
  bool foam_condition_holds = false;
  /// kappa_c_quadratic <= 1/2.
  bool quadratic_weakly_coupled = false;
};

SpectralConstants analyze(const QuadraticGame& game, const NormSpec& ns);
SpectralConstants analyze(const QuadraticGame& game);

RegimeReport classify(const SpectralConstants& c);

/// Largest singular value by power iteration on M'M. Used as an independent
/// check of the SVD-based values.
double power_spectral_norm(const Matrix& M, double tol = 1e-14, int max_iter = 200000);

enum class BoundBranch { Weakly, General };

struct BoundResult {
  double value = 0.0;
  BoundBranch branch = BoundBranch::General;
  bool within_hypotheses = true;
  std::vector<std::string> violations;
};

/// Right-hand side of the two-regime rate for E||x_K^R - x*||^2.
///
/// The branch follows kappa_c <= 1/4 unless forced. Hypothesis violations are
/// listed but the value is always computed.
BoundResult theoretical_bound(const SpectralConstants& c, int R, int K, double gamma, double D,
                              double sigma_bar, std::optional<BoundBranch> force = std::nullopt);

struct Hyperparams {
  double gamma = 0.0;
  long long K = 1;
  bool fully_decoupled = false;
  std::string note;
};

/// Weakly: gamma = mu_bar / L_bar^2, K = ceil(log(4/kappa_c) / (gamma mu_bar)).
/// General: gamma = min(mu/L^2, mu/(K L L_c)), K = K_hint.
Hyperparams prescribed_hyperparams(const SpectralConstants& c, BoundBranch target, long long K_hint);

struct ComplexityRow {
  /// Method name -> round count, O-constants dropped.
  std::map<std::string, double> rounds;
  bool decoupled_zero_communication = false;
  bool decoupled_weak_branch = false;
  std::string label = "up to constants";
};

ComplexityRow complexity_table_row(const SpectralConstants& c, double epsilon);

}  // namespace dsgda
