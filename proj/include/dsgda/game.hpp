#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dsgda/noise.hpp"
#include "dsgda/norm.hpp"
#include "dsgda/point.hpp"

namespace dsgda {

using ConstRef = Eigen::Ref<const Vector>;
using OutRef = Eigen::Ref<Vector>;

/// Smooth two-player zero-sum game min_u max_v f(u, v).
class TwoPlayerGame {
 public:
  virtual ~TwoPlayerGame() = default;

  virtual Index dim_u() const = 0;
  virtual Index dim_v() const = 0;
  virtual double value(const ConstRef& u, const ConstRef& v) const = 0;
  virtual void grad_u(const ConstRef& u, const ConstRef& v, OutRef out) const = 0;
  virtual void grad_v(const ConstRef& u, const ConstRef& v, OutRef out) const = 0;

  /// Known equilibrium, if any.
  virtual std::optional<JointPoint> saddle() const { return std::nullopt; }

  std::vector<Index> block_dims() const { return {dim_u(), dim_v()}; }
  void require_fits(const JointPoint& x, const char* what) const { x.require_layout(block_dims(), what); }
};

/// f(u, v) = 1/2 u'Au - 1/2 v'Bv + u'Cv + b_u'u - b_v'v.
///
/// The linear terms default to zero, in which case the saddle is the origin.
/// They exist so federated clients can differ at the global saddle.
class QuadraticGame final : public TwoPlayerGame {
 public:
  QuadraticGame(Matrix A, Matrix B, Matrix C);
  QuadraticGame(Matrix A, Matrix B, Matrix C, Vector linear_u, Vector linear_v);

  /// 1x1 game with f = a/2 u^2 - b/2 v^2 + c u v.
  static QuadraticGame scalar(double a, double b, double c);

  Index dim_u() const override { return A_.rows(); }
  Index dim_v() const override { return B_.rows(); }
  double value(const ConstRef& u, const ConstRef& v) const override;
  void grad_u(const ConstRef& u, const ConstRef& v, OutRef out) const override;
  void grad_v(const ConstRef& u, const ConstRef& v, OutRef out) const override;
  std::optional<JointPoint> saddle() const override { return saddle_; }

  const Matrix& A() const { return A_; }
  const Matrix& B() const { return B_; }
  const Matrix& C() const { return C_; }
  const Vector& linear_u() const { return bu_; }
  const Vector& linear_v() const { return bv_; }
  bool has_linear_terms() const { return has_linear_; }

  /// [[A, C], [-C', B]]: the Jacobian of F.
  Matrix jacobian() const;

 private:
  Matrix A_, B_, C_;
  Vector bu_, bv_;
  bool has_linear_ = false;
  JointPoint saddle_;
};

/// f(u, v) = tr(V Sigma) - u'Vu + lambda1 |u|^2 - lambda2 |v|^2 with V the
/// row-major m x m reshaping of v and m = dim u.
class ToyGanGame final : public TwoPlayerGame {
 public:
  ToyGanGame(Matrix sigma, double lambda1, double lambda2);

  Index dim_u() const override { return m_; }
  Index dim_v() const override { return m_ * m_; }
  double value(const ConstRef& u, const ConstRef& v) const override;
  void grad_u(const ConstRef& u, const ConstRef& v, OutRef out) const override;
  void grad_v(const ConstRef& u, const ConstRef& v, OutRef out) const override;

  const Matrix& sigma() const { return sigma_; }
  double lambda1() const { return lambda1_; }
  double lambda2() const { return lambda2_; }

  /// Row-major m x m view of v.
  Matrix reshape(const ConstRef& v) const;

 private:
  Index m_;
  Matrix sigma_;
  double lambda1_;
  double lambda2_;
};

/// F(x) = (grad_u f(u, v), -grad_v f(u, v)).
JointPoint operator_F(const TwoPlayerGame& game, const JointPoint& x);

/// F_xref(x) = (grad_u f(u, v_ref), -grad_v f(u_ref, v)).
JointPoint operator_F_bar(const TwoPlayerGame& game, const JointPoint& x, const JointPoint& x_ref);

/// (grad_u f, grad_v f) of the toy GAN objective (no sign flip).
JointPoint toygan_gradients(const ToyGanGame& game, const JointPoint& x);

enum class OracleKind { Decoupled, OwnerU, OwnerV };

/// Operator value plus seeded noise.
///
/// Decoupled: F_xref(x) with sigma_bar split over the joint vector, each
/// player's block drawn from that player's lane. OwnerU / OwnerV: F(x) with the
/// owner's (own, cross) standard deviations on the (own, other) blocks.
/// `call` is the draw counter of the caller; equal calls give equal noise.
JointPoint stochastic_oracle(const TwoPlayerGame& game, const JointPoint& x, const JointPoint& x_ref,
                             const NoiseModel& noise, OracleKind kind, std::uint64_t call,
                             const NormSpec& ns);

}  // namespace dsgda
