#include "dsgda/game.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "dsgda/error.hpp"

namespace dsgda {
namespace {

void require_spd(const Matrix& M, const char* name) {
  if (M.rows() != M.cols() || M.rows() == 0) {
    throw DimensionError(std::string("QuadraticGame: ") + name + " must be square and non-empty");
  }
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidArgument(std::string("QuadraticGame: ") + name + " is not symmetric");
  }
  const double lo = Eigen::SelfAdjointEigenSolver<Matrix>(M, Eigen::EigenvaluesOnly).eigenvalues()(0);
  if (!(lo > 0.0)) {
    throw InvalidArgument(std::string("QuadraticGame: ") + name +
                          " is not positive definite (smallest eigenvalue " + std::to_string(lo) + ")");
  }
}

}  // namespace

QuadraticGame::QuadraticGame(Matrix A, Matrix B, Matrix C)
    : QuadraticGame(std::move(A), std::move(B), std::move(C), Vector(), Vector()) {}

QuadraticGame::QuadraticGame(Matrix A, Matrix B, Matrix C, Vector linear_u, Vector linear_v)
    : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), bu_(std::move(linear_u)), bv_(std::move(linear_v)) {
  require_spd(A_, "A");
  require_spd(B_, "B");
  if (C_.rows() != A_.rows() || C_.cols() != B_.rows()) {
    throw DimensionError("QuadraticGame: C is " + std::to_string(C_.rows()) + "x" + std::to_string(C_.cols()) +
                         ", expected " + std::to_string(A_.rows()) + "x" + std::to_string(B_.rows()));
  }
  if (bu_.size() == 0) bu_ = Vector::Zero(A_.rows());
  if (bv_.size() == 0) bv_ = Vector::Zero(B_.rows());
  if (bu_.size() != A_.rows() || bv_.size() != B_.rows()) {
    throw DimensionError("QuadraticGame: linear term dimensions do not match A and B");
  }
  has_linear_ = !bu_.isZero(0.0) || !bv_.isZero(0.0);
  if (!has_linear_) {
    saddle_ = JointPoint({A_.rows(), B_.rows()});
  } else {
    Vector rhs(bu_.size() + bv_.size());
    rhs << -bu_, -bv_;
    Vector sol = jacobian().partialPivLu().solve(rhs);
    saddle_ = JointPoint::two_player(sol.head(bu_.size()), sol.tail(bv_.size()));
  }
}

QuadraticGame QuadraticGame::scalar(double a, double b, double c) {
  return QuadraticGame(Matrix::Constant(1, 1, a), Matrix::Constant(1, 1, b), Matrix::Constant(1, 1, c));
}

double QuadraticGame::value(const ConstRef& u, const ConstRef& v) const {
  return 0.5 * u.dot(A_ * u) - 0.5 * v.dot(B_ * v) + u.dot(C_ * v) + bu_.dot(u) - bv_.dot(v);
}

void QuadraticGame::grad_u(const ConstRef& u, const ConstRef& v, OutRef out) const {
  out.noalias() = A_ * u;
  out.noalias() += C_ * v;
  out += bu_;
}

void QuadraticGame::grad_v(const ConstRef& u, const ConstRef& v, OutRef out) const {
  out.noalias() = C_.transpose() * u;
  out.noalias() -= B_ * v;
  out -= bv_;
}

Matrix QuadraticGame::jacobian() const {
  const Index du = dim_u(), dv = dim_v();
  Matrix J(du + dv, du + dv);
  J.topLeftCorner(du, du) = A_;
  J.topRightCorner(du, dv) = C_;
  J.bottomLeftCorner(dv, du) = -C_.transpose();
  J.bottomRightCorner(dv, dv) = B_;
  return J;
}

ToyGanGame::ToyGanGame(Matrix sigma, double lambda1, double lambda2)
    : m_(sigma.rows()), sigma_(std::move(sigma)), lambda1_(lambda1), lambda2_(lambda2) {
  if (sigma_.rows() != sigma_.cols() || m_ == 0) throw DimensionError("ToyGanGame: Sigma must be square and non-empty");
  if (!(lambda1_ >= 0.0) || !(lambda2_ >= 0.0)) throw InvalidArgument("ToyGanGame: lambdas must be non-negative");
  const double lo = Eigen::SelfAdjointEigenSolver<Matrix>(sigma_, Eigen::EigenvaluesOnly).eigenvalues()(0);
  if (!(lo > 0.0) || (sigma_ - sigma_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, sigma_.norm())) {
    throw InvalidArgument("ToyGanGame: Sigma is not symmetric positive definite (smallest eigenvalue " +
                          std::to_string(lo) + ")");
  }
}

Matrix ToyGanGame::reshape(const ConstRef& v) const {
  Matrix V(m_, m_);
  for (Index i = 0; i < m_; ++i)
    for (Index j = 0; j < m_; ++j) V(i, j) = v[i * m_ + j];
  return V;
}

double ToyGanGame::value(const ConstRef& u, const ConstRef& v) const {
  const Matrix V = reshape(v);
  return (V * sigma_).trace() - u.dot(V * u) + lambda1_ * u.squaredNorm() - lambda2_ * v.squaredNorm();
}

void ToyGanGame::grad_u(const ConstRef& u, const ConstRef& v, OutRef out) const {
  const Matrix V = reshape(v);
  out.noalias() = -(V + V.transpose()) * u;
  out += 2.0 * lambda1_ * u;
}

void ToyGanGame::grad_v(const ConstRef& u, const ConstRef& v, OutRef out) const {
  for (Index i = 0; i < m_; ++i)
    for (Index j = 0; j < m_; ++j) out[i * m_ + j] = sigma_(j, i) - u[i] * u[j];
  out -= 2.0 * lambda2_ * v;
}

JointPoint operator_F(const TwoPlayerGame& game, const JointPoint& x) {
  game.require_fits(x, "operator_F");
  JointPoint g(game.block_dims());
  game.grad_u(x.u(), x.v(), g.u());
  game.grad_v(x.u(), x.v(), g.v());
  g.v() = -g.v();
  return g;
}

JointPoint operator_F_bar(const TwoPlayerGame& game, const JointPoint& x, const JointPoint& x_ref) {
  game.require_fits(x, "operator_F_bar");
  game.require_fits(x_ref, "operator_F_bar reference");
  JointPoint g(game.block_dims());
  game.grad_u(x.u(), x_ref.v(), g.u());
  game.grad_v(x_ref.u(), x.v(), g.v());
  g.v() = -g.v();
  return g;
}

JointPoint toygan_gradients(const ToyGanGame& game, const JointPoint& x) {
  game.require_fits(x, "toygan_gradients");
  JointPoint g(game.block_dims());
  game.grad_u(x.u(), x.v(), g.u());
  game.grad_v(x.u(), x.v(), g.v());
  return g;
}

JointPoint stochastic_oracle(const TwoPlayerGame& game, const JointPoint& x, const JointPoint& x_ref,
                             const NoiseModel& noise, OracleKind kind, std::uint64_t call,
                             const NormSpec& ns) {
  ns.require_fits(x, "stochastic_oracle");
  const NoiseLevels& s = noise.levels();
  switch (kind) {
    case OracleKind::Decoupled: {
      JointPoint g = operator_F_bar(game, x, x_ref);
      for (std::size_t b = 0; b < 2; ++b) noise.perturb_block(g, b, s.bar, ns, true, call, b, 2);
      return g;
    }
    case OracleKind::OwnerU: {
      JointPoint g = operator_F(game, x);
      noise.perturb_block(g, 0, s.uu, ns, false, call, 0, 2);
      noise.perturb_block(g, 1, s.uv, ns, false, call, 0, 2);
      return g;
    }
    case OracleKind::OwnerV: {
      JointPoint g = operator_F(game, x);
      noise.perturb_block(g, 0, s.vu, ns, false, call, 1, 2);
      noise.perturb_block(g, 1, s.vv, ns, false, call, 1, 2);
      return g;
    }
  }
  throw InvalidArgument("stochastic_oracle: unknown oracle kind");
}

}  // namespace dsgda
