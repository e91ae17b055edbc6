#pragma once

// Size-biased permutations.

#include <span>
#include <vector>

#include "rank2/random.hpp"

namespace rank2 {

struct SizeBiasedDraw {
  std::vector<std::size_t> order;  ///< indices of the positive sizes
  std::vector<double> sizes;       ///< sizes[k] = input[order[k]]
};

/// Sequential weighted sampling without replacement; zero sizes are left out.
SizeBiasedDraw size_biased_permutation(std::span<const double> sizes, Rng& rng);

/// Indices sorted by independent clocks xi_j ~ Exp(s_j).
SizeBiasedDraw exponential_embedding(std::span<const double> sizes, Rng& rng);

}  // namespace rank2
