#pragma once

// Two-sample tests and small summary statistics.

#include <map>
#include <span>
#include <vector>

namespace rank2 {

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov with the asymptotic p-value
/// Q_KS((sqrt(ne) + 0.12 + 0.11/sqrt(ne)) D), ne = n1 n2 / (n1 + n2).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);
double ks_p_value(double statistic, std::size_t n1, std::size_t n2);
/// Statistic above which the asymptotic test rejects at level alpha.
double ks_critical(std::size_t n1, std::size_t n2, double alpha);

/// Integral of |F_a - F_b|; for equal sizes this is the mean distance of the
/// order-statistic coupling.
double wasserstein1(std::span<const double> a, std::span<const double> b);

double mean(std::span<const double> x);
/// Unbiased sample variance (0 for fewer than two points).
double variance(std::span<const double> x);
double pearson(std::span<const double> x, std::span<const double> y);
/// Least-squares slope of y on x through the origin.
double slope_through_origin(std::span<const double> x, std::span<const double> y);

/// Upper tail of the chi-square distribution.
double chi_square_sf(double statistic, double dof);

/// Total variation between two empirical laws given as outcome counts.
template <class Key>
double total_variation(const std::map<Key, double>& p, const std::map<Key, double>& q) {
  double pt = 0.0, qt = 0.0;
  for (const auto& [k, v] : p) pt += v;
  for (const auto& [k, v] : q) qt += v;
  std::map<Key, double> diff;
  for (const auto& [k, v] : p) diff[k] += v / pt;
  for (const auto& [k, v] : q) diff[k] -= v / qt;
  double tv = 0.0;
  for (const auto& [k, v] : diff) tv += v < 0.0 ? -v : v;
  return 0.5 * tv;
}

}  // namespace rank2
