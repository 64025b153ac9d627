#pragma once

// Seeded random density matrices, effects and freestates for property checks.

#include <random>
#include <vector>

#include "knightian/freestate.hpp"

namespace knightian::freestate::sampling {

/// Hilbert-Schmidt random density matrix (G G^dagger / Tr, G complex Gaussian).
DensityMatrix random_density(std::mt19937_64& rng, std::size_t dim);
/// Random eigenbasis with eigenvalues uniform in [0, 1].
Effect random_effect(std::mt19937_64& rng, std::size_t dim);
Freestate random_freestate(std::mt19937_64& rng, std::size_t dim, std::size_t generators);
/// Uniform point of the (k-1)-simplex.
std::vector<double> random_weights(std::mt19937_64& rng, std::size_t k);

}  // namespace knightian::freestate::sampling
