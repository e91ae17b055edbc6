#include <algorithm>
#include <random>

#include "doctest.h"
#include "rank2/core.hpp"
#include "rank2/stats.hpp"

using namespace rank2;

TEST_CASE("two-sample KS on small examples") {
  const std::vector<double> a{1, 2, 3}, b{2, 3, 4}, c{5, 6};
  CHECK(ks_two_sample(a, a).statistic == 0.0);
  CHECK(ks_two_sample(a, a).p_value == 1.0);
  CHECK(ks_two_sample(a, c).statistic == 1.0);
  CHECK(ks_two_sample(a, b).statistic == doctest::Approx(1.0 / 3));
  // Ties across samples move both CDFs together.
  CHECK(ks_two_sample(std::vector<double>{1, 1, 2}, std::vector<double>{1, 2, 2}).statistic ==
        doctest::Approx(1.0 / 3));
}

TEST_CASE("KS critical value and p-value agree") {
  const double c = std::sqrt(-0.5 * std::log(0.025));
  CHECK(ks_critical(100, 100, 0.05) == doctest::Approx(c * std::sqrt(0.02)));
  const double d = ks_critical(1000000, 1000000, 0.05);
  CHECK(ks_p_value(d, 1000000, 1000000) == doctest::Approx(0.05).epsilon(0.02));
  CHECK(ks_p_value(0.0, 10, 10) == 1.0);
}

TEST_CASE("KS rejection rate under the null") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u;
  int rejected = 0;
  const int trials = 2000;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> a(200), b(300);
    for (double& x : a) x = u(rng);
    for (double& x : b) x = u(rng);
    if (ks_two_sample(a, b).p_value < 0.05) ++rejected;
  }
  const double rate = static_cast<double>(rejected) / trials;
  CHECK(rate > 0.03);
  CHECK(rate < 0.07);
}

TEST_CASE("Wasserstein-1") {
  CHECK(wasserstein1(std::vector<double>{0}, std::vector<double>{1}) == 1.0);
  CHECK(wasserstein1(std::vector<double>{0, 1}, std::vector<double>{1, 0}) == 0.0);
  CHECK(wasserstein1(std::vector<double>{0, 2}, std::vector<double>{1}) == doctest::Approx(1.0));
  CHECK(wasserstein1(std::vector<double>{0, 0, 3}, std::vector<double>{1}) == doctest::Approx(4.0 / 3));

  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> a(37), b(37);
    for (double& x : a) x = g(rng);
    for (double& x : b) x = 2 * g(rng) + 1;
    const double w = wasserstein1(a, b);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double coupling = 0;
    for (std::size_t k = 0; k < a.size(); ++k) coupling += std::abs(a[k] - b[k]);
    CHECK(w == doctest::Approx(coupling / 37).epsilon(1e-12));
    CHECK(wasserstein1(b, a) == doctest::Approx(w).epsilon(1e-12));
  }
}

TEST_CASE("empty samples") {
  const std::vector<double> none, one{1};
  for (auto f : {+[](std::span<const double> a, std::span<const double> b) { ks_two_sample(a, b); },
                 +[](std::span<const double> a, std::span<const double> b) { wasserstein1(a, b); }}) {
    try {
      f(none, one);
      FAIL("expected EmptySample");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::EmptySample);
    }
  }
  CHECK_THROWS_AS(mean(none), Error);
  CHECK(variance(one) == 0.0);
}

TEST_CASE("summaries") {
  const std::vector<double> x{1, 2, 3, 4}, y{2, 4, 6, 8}, z{4, 3, 2, 1};
  CHECK(mean(x) == 2.5);
  CHECK(variance(x) == doctest::Approx(5.0 / 3));
  CHECK(pearson(x, y) == doctest::Approx(1.0));
  CHECK(pearson(x, z) == doctest::Approx(-1.0));
  CHECK(slope_through_origin(x, y) == doctest::Approx(2.0));
  CHECK(chi_square_sf(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(chi_square_sf(0, 3) == 1.0);
  std::map<int, double> p{{1, 1}, {2, 1}}, q{{2, 3}, {3, 1}};
  CHECK(total_variation(p, q) == doctest::Approx(0.5));
}
