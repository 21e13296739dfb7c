#include "dsgda/point.hpp"

#include <string>

#include "dsgda/error.hpp"

namespace dsgda {

JointPoint::JointPoint(std::vector<Index> block_dims) : dims_(std::move(block_dims)) {
  Index total = 0;
  offsets_.reserve(dims_.size());
  for (Index d : dims_) {
    if (d < 0) throw InvalidArgument("block dimension must be non-negative");
    offsets_.push_back(total);
    total += d;
  }
  data_ = Vector::Zero(total);
}

JointPoint JointPoint::from_blocks(const std::vector<Vector>& blocks) {
  std::vector<Index> dims;
  dims.reserve(blocks.size());
  for (const auto& b : blocks) dims.push_back(b.size());
  JointPoint p(std::move(dims));
  for (std::size_t i = 0; i < blocks.size(); ++i) p.block(i) = blocks[i];
  return p;
}

JointPoint JointPoint::two_player(const Vector& u, const Vector& v) { return from_blocks({u, v}); }

JointPoint JointPoint::two_player(double u, double v) {
  return from_blocks({Vector::Constant(1, u), Vector::Constant(1, v)});
}

Eigen::VectorBlock<Vector> JointPoint::block(std::size_t i) {
  return data_.segment(offsets_.at(i), dims_.at(i));
}

Eigen::VectorBlock<const Vector> JointPoint::block(std::size_t i) const {
  return data_.segment(offsets_.at(i), dims_.at(i));
}

void JointPoint::require_layout(const std::vector<Index>& dims, const char* what) const {
  if (dims.size() != dims_.size()) {
    throw DimensionError(std::string(what) + ": expected " + std::to_string(dims.size()) +
                         " blocks, got " + std::to_string(dims_.size()));
  }
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (dims[i] != dims_[i]) {
      throw DimensionError(std::string(what) + ": block " + std::to_string(i) + " has dimension " +
                           std::to_string(dims_[i]) + ", expected " + std::to_string(dims[i]));
    }
  }
}

JointPoint& JointPoint::operator+=(const JointPoint& rhs) {
  rhs.require_layout(dims_, "JointPoint addition");
  data_ += rhs.data_;
  return *this;
}

JointPoint& JointPoint::operator-=(const JointPoint& rhs) {
  rhs.require_layout(dims_, "JointPoint subtraction");
  data_ -= rhs.data_;
  return *this;
}

JointPoint& JointPoint::operator*=(double s) {
  data_ *= s;
  return *this;
}

double JointPoint::dot(const JointPoint& other) const {
  other.require_layout(dims_, "JointPoint inner product");
  return data_.dot(other.data_);
}

}  // namespace dsgda
