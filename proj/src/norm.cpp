#include "dsgda/norm.hpp"

#include <cmath>
#include <string>

#include "dsgda/error.hpp"

namespace dsgda {

NormSpec::NormSpec(std::vector<double> alphas, std::vector<Matrix> block_matrices)
    : alphas_(std::move(alphas)) {
  if (alphas_.size() != block_matrices.size()) {
    throw InvalidArgument("NormSpec: " + std::to_string(alphas_.size()) + " weights for " +
                          std::to_string(block_matrices.size()) + " block matrices");
  }
  blocks_.reserve(block_matrices.size());
  for (std::size_t i = 0; i < block_matrices.size(); ++i) {
    if (!(alphas_[i] > 0.0) || !std::isfinite(alphas_[i])) {
      throw InvalidArgument("NormSpec: alpha of block " + std::to_string(i) + " must be positive");
    }
    Block b;
    b.P = std::move(block_matrices[i]);
    if (b.P.rows() != b.P.cols()) {
      throw InvalidArgument("NormSpec: block matrix " + std::to_string(i) + " is not square");
    }
    const Index n = b.P.rows();
    const double scale = std::max(1.0, b.P.cwiseAbs().maxCoeff());
    if ((b.P - b.P.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      throw InvalidArgument("NormSpec: block matrix " + std::to_string(i) + " is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(b.P);
    if (n > 0 && !(eig.eigenvalues().minCoeff() > 0.0)) {
      throw InvalidArgument("NormSpec: block matrix " + std::to_string(i) +
                            " is not positive definite (smallest eigenvalue " +
                            std::to_string(eig.eigenvalues().minCoeff()) + ")");
    }
    b.identity = b.P.isIdentity(0.0);
    b.llt.compute(b.P);
    b.L = b.llt.matrixL();
    if (n > 0) {
      b.sqrt = eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().asDiagonal() *
               eig.eigenvectors().transpose();
      b.inv_sqrt = eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                   eig.eigenvectors().transpose();
    } else {
      b.sqrt = b.inv_sqrt = Matrix(0, 0);
    }
    blocks_.push_back(std::move(b));
  }
}

NormSpec NormSpec::identity(const std::vector<Index>& block_dims) {
  return weighted(block_dims, std::vector<double>(block_dims.size(), 1.0));
}

NormSpec NormSpec::weighted(const std::vector<Index>& block_dims, std::vector<double> alphas) {
  std::vector<Matrix> mats;
  mats.reserve(block_dims.size());
  for (Index d : block_dims) mats.push_back(Matrix::Identity(d, d));
  return NormSpec(std::move(alphas), std::move(mats));
}

std::vector<Index> NormSpec::block_dims() const {
  std::vector<Index> dims;
  dims.reserve(blocks_.size());
  for (const auto& b : blocks_) dims.push_back(b.P.rows());
  return dims;
}

bool NormSpec::is_identity() const {
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (!blocks_[i].identity || alphas_[i] != 1.0) return false;
  }
  return true;
}

void NormSpec::require_fits(const JointPoint& x, const char* what) const {
  x.require_layout(block_dims(), what);
}

double NormSpec::block_primal_norm_sq(std::size_t i, const Eigen::Ref<const Vector>& x) const {
  const Block& b = blocks_.at(i);
  if (b.identity) return x.squaredNorm();
  return x.dot(b.P * x);
}

double NormSpec::block_dual_norm_sq(std::size_t i, const Eigen::Ref<const Vector>& g) const {
  const Block& b = blocks_.at(i);
  if (b.identity) return g.squaredNorm();
  return g.dot(b.llt.solve(g));
}

double NormSpec::primal_norm_sq(const JointPoint& x) const {
  require_fits(x, "primal_norm");
  double s = 0.0;
  for (std::size_t i = 0; i < blocks_.size(); ++i) s += alphas_[i] * block_primal_norm_sq(i, x.block(i));
  return s;
}

double NormSpec::dual_norm_sq(const JointPoint& g) const {
  require_fits(g, "dual_norm");
  double s = 0.0;
  for (std::size_t i = 0; i < blocks_.size(); ++i) s += block_dual_norm_sq(i, g.block(i)) / alphas_[i];
  return s;
}

double NormSpec::primal_norm(const JointPoint& x) const { return std::sqrt(primal_norm_sq(x)); }
double NormSpec::dual_norm(const JointPoint& g) const { return std::sqrt(dual_norm_sq(g)); }

void NormSpec::apply_inverse_block(std::size_t i, Eigen::Ref<Vector> g) const {
  const Block& b = blocks_.at(i);
  if (!b.identity) g = b.llt.solve(g);
  if (alphas_[i] != 1.0) g /= alphas_[i];
}

JointPoint NormSpec::apply_inverse(const JointPoint& g) const {
  require_fits(g, "apply_inverse");
  JointPoint out = g;
  for (std::size_t i = 0; i < blocks_.size(); ++i) apply_inverse_block(i, out.block(i));
  return out;
}

Matrix NormSpec::full_sqrt() const {
  Index n = 0;
  for (const auto& b : blocks_) n += b.P.rows();
  Matrix M = Matrix::Zero(n, n);
  Index off = 0;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const Index d = blocks_[i].P.rows();
    M.block(off, off, d, d) = std::sqrt(alphas_[i]) * blocks_[i].sqrt;
    off += d;
  }
  return M;
}

Matrix NormSpec::full_inv_sqrt() const {
  Index n = 0;
  for (const auto& b : blocks_) n += b.P.rows();
  Matrix M = Matrix::Zero(n, n);
  Index off = 0;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const Index d = blocks_[i].P.rows();
    M.block(off, off, d, d) = blocks_[i].inv_sqrt / std::sqrt(alphas_[i]);
    off += d;
  }
  return M;
}

}  // namespace dsgda
