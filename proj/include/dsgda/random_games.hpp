#pragma once

#include <cstdint>

#include "dsgda/game.hpp"
#include "dsgda/rng.hpp"

namespace dsgda {

/// Eigenvalue range for generated SPD matrices (sampled log-uniformly).
struct EigenRange {
  double lo = 1.0;
  double hi = 10.0;
};

/// Q diag(lambda) Q' with Q from the QR factorization of a Gaussian matrix.
Matrix random_spd(Index d, EigenRange range, RngStream& rng);

/// Standard Gaussian matrix.
Matrix random_gaussian(Index rows, Index cols, RngStream& rng);

/// Coupling matrix with spectral norm exactly `norm`: a random SPD matrix when
/// square, a Gaussian matrix otherwise, rescaled.
Matrix random_coupling(Index rows, Index cols, double norm, EigenRange range, RngStream& rng);

/// Random quadratic game with SPD blocks and coupling of spectral norm `coupling_norm`.
QuadraticGame random_quadratic(Index du, Index dv, double coupling_norm, EigenRange range, RngStream& rng);

/// Random quadratic game (Euclidean geometry) whose coupling degree
/// ||C|| / min(mu_u, mu_v) equals `kappa_c`.
QuadraticGame random_quadratic_with_coupling_degree(Index du, Index dv, double kappa_c, EigenRange range,
                                                    RngStream& rng);

/// Uniform random point in [-scale, scale]^d with the given blocks.
JointPoint random_point(const std::vector<Index>& dims, double scale, RngStream& rng);

}  // namespace dsgda
