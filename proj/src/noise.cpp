#include "dsgda/noise.hpp"

#include <cmath>
#include <string>

#include "dsgda/error.hpp"

namespace dsgda {
namespace {

void require_nonnegative(double s, const char* name) {
  if (!(s >= 0.0) || !std::isfinite(s)) {
    throw InvalidArgument(std::string("NoiseModel: ") + name + " must be a finite non-negative std");
  }
}

}  // namespace

NoiseModel::NoiseModel(NoiseLevels levels, std::uint64_t seed, std::uint64_t stream_id,
                       std::vector<double> player_sigmas)
    : levels_(levels), seed_(seed), stream_id_(stream_id), player_sigmas_(std::move(player_sigmas)) {
  require_nonnegative(levels_.uu, "sigma_uu");
  require_nonnegative(levels_.uv, "sigma_uv");
  require_nonnegative(levels_.vu, "sigma_vu");
  require_nonnegative(levels_.vv, "sigma_vv");
  require_nonnegative(levels_.bar, "sigma_bar");
  for (double s : player_sigmas_) require_nonnegative(s, "player sigma");
}

bool NoiseModel::is_zero() const {
  if (levels_.uu != 0.0 || levels_.uv != 0.0 || levels_.vu != 0.0 || levels_.vv != 0.0 ||
      levels_.bar != 0.0) {
    return false;
  }
  for (double s : player_sigmas_) {
    if (s != 0.0) return false;
  }
  return true;
}

NoiseModel NoiseModel::with_stream(std::uint64_t stream_id) const {
  NoiseModel m = *this;
  m.stream_id_ = stream_id;
  return m;
}

NoiseModel NoiseModel::with_seed(std::uint64_t seed) const {
  NoiseModel m = *this;
  m.seed_ = seed;
  return m;
}

double NoiseModel::own_sigma(std::size_t player, std::size_t num_players) const {
  if (!player_sigmas_.empty()) {
    if (player_sigmas_.size() != num_players) {
      throw DimensionError("NoiseModel: " + std::to_string(player_sigmas_.size()) +
                           " player sigmas for " + std::to_string(num_players) + " players");
    }
    return player_sigmas_[player];
  }
  if (num_players == 2) return player == 0 ? levels_.uu : levels_.vv;
  return 0.0;
}

double NoiseModel::standard_normal(std::uint64_t call, std::size_t player, std::size_t num_players,
                                   Index total_dim, Index coordinate) const {
  const std::uint64_t idx =
      (call * num_players + player) * static_cast<std::uint64_t>(total_dim) + coordinate;
  return CounterRng(seed_, stream_id_).normal(idx);
}

void NoiseModel::perturb_block(JointPoint& g, std::size_t b, double sigma, const NormSpec& ns,
                               bool joint_scaling, std::uint64_t call, std::size_t player,
                               std::size_t num_players) const {
  if (sigma == 0.0) return;
  const Index d = g.block_dim(b);
  if (d == 0) return;
  const Index off = g.block_offset(b);
  const Index total = g.dim();
  Vector z(d);
  for (Index j = 0; j < d; ++j) z[j] = standard_normal(call, player, num_players, total, off + j);
  double scale = sigma / std::sqrt(static_cast<double>(joint_scaling ? total : d));
  if (joint_scaling) scale *= std::sqrt(ns.alpha(b));
  if (ns.block_is_identity(b)) {
    g.block(b) += scale * z;
  } else {
    g.block(b) += scale * (ns.cholesky_lower(b) * z);
  }
}

}  // namespace dsgda
