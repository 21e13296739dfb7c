#include "dsgda/random_games.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "dsgda/error.hpp"

namespace dsgda {

Matrix random_gaussian(Index rows, Index cols, RngStream& rng) {
  Matrix G(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) G(i, j) = rng.normal();
  return G;
}

Matrix random_spd(Index d, EigenRange range, RngStream& rng) {
  if (d <= 0) throw InvalidArgument("random_spd: dimension must be positive");
  if (!(range.lo > 0.0) || !(range.hi >= range.lo)) throw InvalidArgument("random_spd: need 0 < lo <= hi");
  const Matrix G = random_gaussian(d, d, rng);
  const Matrix Q = Eigen::HouseholderQR<Matrix>(G).householderQ();
  Vector lambda(d);
  const double llo = std::log(range.lo), lhi = std::log(range.hi);
  for (Index i = 0; i < d; ++i) lambda[i] = std::exp(rng.uniform(llo, lhi));
  Matrix S = Q * lambda.asDiagonal() * Q.transpose();
  return 0.5 * (S + S.transpose());
}

Matrix random_coupling(Index rows, Index cols, double norm, EigenRange range, RngStream& rng) {
  if (norm < 0.0) throw InvalidArgument("random_coupling: norm must be non-negative");
  Matrix C = rows == cols ? random_spd(rows, range, rng) : random_gaussian(rows, cols, rng);
  if (norm == 0.0) return Matrix::Zero(rows, cols);
  const double s = Eigen::JacobiSVD<Matrix>(C).singularValues()(0);
  return C * (norm / s);
}

QuadraticGame random_quadratic(Index du, Index dv, double coupling_norm, EigenRange range, RngStream& rng) {
  Matrix A = random_spd(du, range, rng);
  Matrix B = random_spd(dv, range, rng);
  Matrix C = random_coupling(du, dv, coupling_norm, range, rng);
  return QuadraticGame(std::move(A), std::move(B), std::move(C));
}

QuadraticGame random_quadratic_with_coupling_degree(Index du, Index dv, double kappa_c, EigenRange range,
                                                    RngStream& rng) {
  Matrix A = random_spd(du, range, rng);
  Matrix B = random_spd(dv, range, rng);
  const double mu_u = Eigen::SelfAdjointEigenSolver<Matrix>(A, Eigen::EigenvaluesOnly).eigenvalues()(0);
  const double mu_v = Eigen::SelfAdjointEigenSolver<Matrix>(B, Eigen::EigenvaluesOnly).eigenvalues()(0);
  Matrix C = random_coupling(du, dv, kappa_c * std::min(mu_u, mu_v), range, rng);
  return QuadraticGame(std::move(A), std::move(B), std::move(C));
}

JointPoint random_point(const std::vector<Index>& dims, double scale, RngStream& rng) {
  JointPoint x(dims);
  auto flat = x.flat();
  for (Index i = 0; i < flat.size(); ++i) flat[i] = rng.uniform(-scale, scale);
  return x;
}

}  // namespace dsgda
