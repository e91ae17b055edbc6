#include "rank2/sizebias.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rank2/core.hpp"

namespace rank2 {

namespace {

std::vector<std::size_t> positive_indices(std::span<const double> sizes) {
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < sizes.size(); ++j) {
    if (!std::isfinite(sizes[j]) || sizes[j] < 0.0) throw Error(Errc::InvalidArgument, "sizes must be finite and >= 0");
    if (sizes[j] > 0.0) idx.push_back(j);
  }
  if (idx.empty()) throw Error(Errc::AllZero, "all sizes are zero");
  return idx;
}

SizeBiasedDraw finish(std::vector<std::size_t> order, std::span<const double> sizes) {
  SizeBiasedDraw d;
  d.sizes.reserve(order.size());
  for (std::size_t j : order) d.sizes.push_back(sizes[j]);
  d.order = std::move(order);
  return d;
}

}  // namespace

SizeBiasedDraw size_biased_permutation(std::span<const double> sizes, Rng& rng) {
  std::vector<std::size_t> pool = positive_indices(sizes);
  std::vector<std::size_t> order;
  order.reserve(pool.size());
  while (!pool.empty()) {
    double total = 0.0;
    for (std::size_t j : pool) total += sizes[j];
    const double u = uniform_open(rng) * total;
    double acc = 0.0;
    std::size_t pick = pool.size() - 1;
    for (std::size_t k = 0; k < pool.size(); ++k) {
      acc += sizes[pool[k]];
      if (u < acc) {
        pick = k;
        break;
      }
    }
    order.push_back(pool[pick]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return finish(std::move(order), sizes);
}

SizeBiasedDraw exponential_embedding(std::span<const double> sizes, Rng& rng) {
  std::vector<std::size_t> idx = positive_indices(sizes);
  std::vector<double> clock(sizes.size(), 0.0);
  for (std::size_t j : idx) clock[j] = exponential(rng, sizes[j]);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return clock[a] < clock[b]; });
  return finish(std::move(idx), sizes);
}

}  // namespace rank2
