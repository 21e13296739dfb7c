#pragma once

#include <cstdint>
#include <vector>

#include "dsgda/norm.hpp"
#include "dsgda/point.hpp"
#include "dsgda/rng.hpp"

namespace dsgda {

/// Standard deviations of the unbalanced two-oracle noise model.
///
/// uu/uv: noise of player u's oracle on the u and v blocks; vv/vu likewise for
/// player v. bar: noise of the single decoupled oracle over the whole joint vector.
struct NoiseLevels {
  double uu = 0.0;
  double uv = 0.0;
  double vu = 0.0;
  double vv = 0.0;
  double bar = 0.0;
};

/// Seeded zero-mean Gaussian gradient noise.
///
/// Noise on a block is Gaussian, isotropic in the dual geometry of that block,
/// and scaled so its expected squared dual norm equals the configured variance.
/// Draw (call, player, coordinate) maps to a fixed counter of the underlying
/// CounterRng, which makes every draw reproducible and order independent.
class NoiseModel {
 public:
  NoiseModel() = default;
  NoiseModel(NoiseLevels levels, std::uint64_t seed, std::uint64_t stream_id = 0,
             std::vector<double> player_sigmas = {});

  const NoiseLevels& levels() const { return levels_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  const std::vector<double>& player_sigmas() const { return player_sigmas_; }
  bool is_zero() const;

  /// Same levels on a different stream.
  NoiseModel with_stream(std::uint64_t stream_id) const;
  NoiseModel with_seed(std::uint64_t seed) const;

  /// Std of player n's noise on its own block. Two players: uu / vv unless
  /// explicit per-player values were given.
  double own_sigma(std::size_t player, std::size_t num_players) const;

  /// Raw standard normal for a (call, player, flat coordinate) triple.
  double standard_normal(std::uint64_t call, std::size_t player, std::size_t num_players,
                         Index total_dim, Index coordinate) const;

  /// Adds noise to block `b` of `g`.
  ///
  /// `sigma` is the target root-mean-square dual norm of the added vector.
  /// With `joint_scaling` the coordinates share sigma across the full joint
  /// dimension and the metric includes alpha (decoupled-oracle variance);
  /// otherwise sigma is spread over the block alone and measured in the block
  /// dual norm (per-owner variance).
  void perturb_block(JointPoint& g, std::size_t b, double sigma, const NormSpec& ns,
                     bool joint_scaling, std::uint64_t call, std::size_t player,
                     std::size_t num_players) const;

 private:
  NoiseLevels levels_;
  std::uint64_t seed_ = 0;
  std::uint64_t stream_id_ = 0;
  std::vector<double> player_sigmas_;
};

}  // namespace dsgda
