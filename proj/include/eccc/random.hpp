// Seeded random states, bases and unitaries (Haar measure).
#pragma once

#include <cstdint>

#include "eccc/types.hpp"

namespace eccc {

/// Default seed for every randomized entry point (0xECCC).
inline constexpr std::uint64_t kDefaultSeed = 0xECCC;

/// Mixes (seed, stream, substream) into an independent child seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t substream = 0);

/// Haar-distributed pure state: normalized vector of complex Gaussians.
PureState random_pure_state(Index dim, std::uint64_t seed);

/// Haar-distributed unitary via QR of a complex Gaussian matrix with the
/// R-diagonal phase correction that makes the distribution uniform.
Matrix random_unitary(Index dim, std::uint64_t seed);

/// Columns of a Haar-distributed unitary.
OrthonormalBasis random_basis(Index dim, std::uint64_t seed);

/// Random density matrix G G^dagger / tr(G G^dagger) with G a dim x rank
/// complex Gaussian matrix; rank 1 gives a Haar pure state, rank 0 means
/// full rank.
DensityMatrix random_density(Index dim, std::uint64_t seed, Index rank = 0);

}  // namespace eccc
