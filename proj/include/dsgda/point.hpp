#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace dsgda {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A joint strategy profile: one real vector per player, stored contiguously.
///
/// The block layout is fixed when the point is created; arithmetic and
/// assignment between points require identical layouts.
class JointPoint {
 public:
  JointPoint() = default;

  /// Zero point with the given block dimensions.
  explicit JointPoint(std::vector<Index> block_dims);

  static JointPoint from_blocks(const std::vector<Vector>& blocks);
  static JointPoint two_player(const Vector& u, const Vector& v);
  static JointPoint two_player(double u, double v);

  std::size_t num_blocks() const { return dims_.size(); }
  Index dim() const { return data_.size(); }
  Index block_dim(std::size_t i) const { return dims_.at(i); }
  Index block_offset(std::size_t i) const { return offsets_.at(i); }
  const std::vector<Index>& block_dims() const { return dims_; }

  Eigen::VectorBlock<Vector> block(std::size_t i);
  Eigen::VectorBlock<const Vector> block(std::size_t i) const;

  Eigen::VectorBlock<Vector> u() { return block(0); }
  Eigen::VectorBlock<const Vector> u() const { return block(0); }
  Eigen::VectorBlock<Vector> v() { return block(1); }
  Eigen::VectorBlock<const Vector> v() const { return block(1); }

  const Vector& flat() const { return data_; }
  /// Mutable view of the stacked coordinates; cannot change the layout.
  Eigen::Ref<Vector> flat() { return data_; }

  bool same_layout(const JointPoint& other) const { return dims_ == other.dims_; }
  /// Throws DimensionError naming the first offending block.
  void require_layout(const std::vector<Index>& dims, const char* what) const;

  bool all_finite() const { return data_.allFinite(); }

  JointPoint& operator+=(const JointPoint& rhs);
  JointPoint& operator-=(const JointPoint& rhs);
  JointPoint& operator*=(double s);

  friend JointPoint operator+(JointPoint lhs, const JointPoint& rhs) { return lhs += rhs; }
  friend JointPoint operator-(JointPoint lhs, const JointPoint& rhs) { return lhs -= rhs; }
  friend JointPoint operator*(double s, JointPoint p) { return p *= s; }

  /// Euclidean inner product of the stacked coordinates.
  double dot(const JointPoint& other) const;

 private:
  std::vector<Index> dims_;
  std::vector<Index> offsets_;
  Vector data_;
};

}  // namespace dsgda
