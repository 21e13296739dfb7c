#pragma once

#include <vector>

#include "dsgda/point.hpp"

namespace dsgda {

/// Block-weighted Euclidean geometry on the joint space.
///
/// Primal norm: ||x||^2 = sum_i alpha_i <P_i x_i, x_i>.
/// Dual norm:   ||g||_*^2 = sum_i (1/alpha_i) <g_i, P_i^{-1} g_i>.
///
/// Every P_i is validated as symmetric positive definite on construction and
/// factored once (Cholesky); identity blocks take a fast path.
class NormSpec {
 public:
  NormSpec() = default;
  NormSpec(std::vector<double> alphas, std::vector<Matrix> block_matrices);

  /// alpha = 1 and P = I for every block.
  static NormSpec identity(const std::vector<Index>& block_dims);
  /// P = I with the given weights.
  static NormSpec weighted(const std::vector<Index>& block_dims, std::vector<double> alphas);

  std::size_t num_blocks() const { return alphas_.size(); }
  std::vector<Index> block_dims() const;
  double alpha(std::size_t i) const { return alphas_.at(i); }
  const Matrix& block_matrix(std::size_t i) const { return blocks_.at(i).P; }
  bool block_is_identity(std::size_t i) const { return blocks_.at(i).identity; }
  bool is_identity() const;

  double primal_norm(const JointPoint& x) const;
  double dual_norm(const JointPoint& g) const;
  double primal_norm_sq(const JointPoint& x) const;
  double dual_norm_sq(const JointPoint& g) const;

  /// Norms of a single block, without the alpha weight.
  double block_primal_norm_sq(std::size_t i, const Eigen::Ref<const Vector>& x) const;
  double block_dual_norm_sq(std::size_t i, const Eigen::Ref<const Vector>& g) const;

  /// In place: g_i <- (alpha_i P_i)^{-1} g_i.
  void apply_inverse_block(std::size_t i, Eigen::Ref<Vector> g) const;
  /// Returns P^{-1} g with P = diag(alpha_i P_i).
  JointPoint apply_inverse(const JointPoint& g) const;

  /// Lower Cholesky factor of P_i (not including alpha).
  const Matrix& cholesky_lower(std::size_t i) const { return blocks_.at(i).L; }
  /// P_i^{1/2} and P_i^{-1/2} (symmetric square roots).
  const Matrix& sqrt_block(std::size_t i) const { return blocks_.at(i).sqrt; }
  const Matrix& inv_sqrt_block(std::size_t i) const { return blocks_.at(i).inv_sqrt; }

  /// Dense P^{1/2} and P^{-1/2} of the full block-diagonal metric (alpha included).
  Matrix full_sqrt() const;
  Matrix full_inv_sqrt() const;

  /// Throws DimensionError naming the offending block when x does not fit.
  void require_fits(const JointPoint& x, const char* what) const;

 private:
  struct Block {
    Matrix P;
    Matrix L;
    Eigen::LLT<Matrix> llt;
    Matrix sqrt;
    Matrix inv_sqrt;
    bool identity = true;
  };
  std::vector<double> alphas_;
  std::vector<Block> blocks_;
};

}  // namespace dsgda
