#pragma once

#include "dsgda/game.hpp"
#include "dsgda/norm.hpp"

namespace dsgda {

/// Exact state after k noiseless decoupled local steps from x0.
///
/// With T_u = I - gamma (alpha_u P_u)^{-1} A and the frozen best response
/// u* = -A^{-1}(C v0 + b_u): u_k = u* + T_u^k (u0 - u*); v likewise.
/// Powers are taken through a symmetric eigendecomposition.
JointPoint explicit_iterate(const QuadraticGame& game, const JointPoint& x0, double gamma, long long k);
JointPoint explicit_iterate(const QuadraticGame& game, const JointPoint& x0, double gamma, long long k,
                            const NormSpec& ns);

/// gamma <= max(1/L_u, 1/L_v): the step range the closed-form norm bound is stated for.
bool within_closed_form_step_range(const QuadraticGame& game, double gamma);

/// One round of decoupled GDA as a linear map: x_K = M x_0 + offset.
struct RoundMatrix {
  /// Single-step block-diagonal map diag(T_u, T_v).
  Matrix Q;
  /// Q^K.
  Matrix QK;
  /// Off-diagonal interaction part [[0, -E_u], [E_v, 0]].
  Matrix E;
  Matrix M;
  /// Nonzero only when the game has linear terms.
  Vector offset;
  /// Operator norm of M in the primal geometry: ||P^{1/2} M P^{-1/2}||_2.
  double norm = 0.0;
  /// max{(1-gamma mu_u)^K, (1-gamma mu_v)^K} + ||C|| max{delta(A), delta(B)}^{1/2}.
  double norm_bound = 0.0;
  /// The norm bound is stated for the Euclidean geometry only.
  bool bound_applicable = true;
};

RoundMatrix round_matrix(const QuadraticGame& game, double gamma, long long K);
RoundMatrix round_matrix(const QuadraticGame& game, double gamma, long long K, const NormSpec& ns);

struct RateBound {
  double value = 0.0;
  /// ||C|| / mu_min >= 1: the bound cannot decrease.
  bool vacuous = false;
  /// ||C|| max(1/mu_u, 1/mu_v) <= 1/2.
  bool weakly_coupled = false;
  /// gamma <= max(1/L_u, 1/L_v) with delta(A), delta(B) <= 1.
  bool within_hypotheses = true;
};

/// D (exp(-(mu_min/L_max) K) + ||C||/mu_min)^R in the Euclidean geometry.
RateBound quadratic_rate_bound(const QuadraticGame& game, double gamma, long long K, int R, double D);

}  // namespace dsgda
