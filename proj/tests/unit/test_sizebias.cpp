#include <map>

#include "doctest.h"
#include "rank2/core.hpp"
#include "rank2/sizebias.hpp"
#include "rank2/stats.hpp"

using namespace rank2;

TEST_CASE("two sizes") {
  const std::vector<double> s{2, 1};
  const int N = 60000;
  for (auto draw : {&size_biased_permutation, &exponential_embedding}) {
    int first = 0;
    for (int k = 0; k < N; ++k) {
      Rng rng = make_rng(1, k);
      const SizeBiasedDraw d = draw(s, rng);
      REQUIRE(d.order.size() == 2);
      CHECK(d.sizes[0] == s[d.order[0]]);
      if (d.order[0] == 0) ++first;
    }
    const double p = 2.0 / 3;
    CHECK(std::abs(static_cast<double>(first) / N - p) < 4 * std::sqrt(p * (1 - p) / N));
  }
}

TEST_CASE("equal sizes give a uniform permutation") {
  const std::vector<double> s{1, 1, 1};
  const int N = 30000;
  std::map<std::vector<std::size_t>, double> counts;
  for (int k = 0; k < N; ++k) {
    Rng rng = make_rng(2, k);
    ++counts[size_biased_permutation(s, rng).order];
  }
  REQUIRE(counts.size() == 6);
  double chi2 = 0;
  for (const auto& [perm, c] : counts) chi2 += (c - N / 6.0) * (c - N / 6.0) / (N / 6.0);
  CHECK(chi_square_sf(chi2, 5) > 1e-3);
}

TEST_CASE("zero sizes are left out") {
  const std::vector<double> s{0, 3, 0, 1};
  Rng rng(3);
  const SizeBiasedDraw d = size_biased_permutation(s, rng);
  REQUIRE(d.order.size() == 2);
  for (std::size_t j : d.order) CHECK(s[j] > 0);
  const std::vector<double> zeros{0, 0};
  for (auto draw : {&size_biased_permutation, &exponential_embedding}) {
    try {
      draw(zeros, rng);
      FAIL("expected AllZero");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::AllZero);
    }
  }
  CHECK_THROWS_AS(size_biased_permutation(std::vector<double>{1, -1}, rng), Error);
}

TEST_CASE("sequential sampling and exponential clocks agree in law") {
  const std::vector<double> s{3, 2, 1, 0.5};
  const int N = 50000;
  std::map<std::vector<std::size_t>, double> a, b;
  for (int k = 0; k < N; ++k) {
    Rng r1 = make_rng(4, k), r2 = make_rng(5, k);
    ++a[size_biased_permutation(s, r1).order];
    ++b[exponential_embedding(s, r2).order];
  }
  CHECK(total_variation(a, b) < 0.02);
  // Exact law of the first two picks.
  const double p01 = (3.0 / 6.5) * (2.0 / 3.5);
  double f01 = 0;
  for (const auto& [perm, c] : a)
    if (perm[0] == 0 && perm[1] == 1) f01 += c;
  CHECK(std::abs(f01 / N - p01) < 4 * std::sqrt(p01 * (1 - p01) / N));
}
