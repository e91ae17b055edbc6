#pragma once

// Thinned Levy processes W^{beta,theta,lambda}, the three regime limits and
// their excursion-length vectors.

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "rank2/cadlag.hpp"
#include "rank2/params.hpp"
#include "rank2/random.hpp"

namespace rank2 {

/// Smallest P with sum_{p >= P} theta_p^3 < 1e-6 sum theta_p^3.
std::size_t truncation_index(std::span<const double> theta);

/// J^theta on [0, T]: jumps theta_p at xi_p ~ Exp(theta_p), drift -sum theta_p^2.
JumpDriftPath simulate_J(std::span<const double> theta, double T, Rng& rng);

struct ThinnedLevySample {
  LimitTriple params;
  GridPath path;
  std::size_t truncation = 0;  ///< number of theta atoms kept
  double dropped_l3 = 0.0;     ///< cube-sum of the dropped atoms
};

/// sqrt(beta) B on a grid of step h, exact lambda t - beta t^2/2 and
/// compensator at grid points, J jumps as an exact overlay. The jump clocks
/// are drawn before the Brownian increments, so a longer horizon with the
/// same generator state extends the same path.
ThinnedLevySample simulate_W(const LimitTriple& params, double h, double T, Rng& rng);

/// 15 * (beta_eff^{-1/3} + 2 max(lambda, 0) / beta_eff), beta_eff = beta + sum theta^3.
double default_levy_horizon(const LimitTriple& params);

struct LevySettings {
  std::optional<double> h;  ///< default 1e-4 * T
  std::optional<double> T;  ///< default from default_levy_horizon
  int max_doublings = 3;
};

struct ZetaResult {
  std::vector<double> lengths;  ///< non-increasing
  double horizon = 0.0;
  double step = 0.0;
  bool adequate = true;
  int doublings = 0;
};

/// Excursions of length >= this fraction of the largest one count towards
/// the horizon-adequacy check; shorter ones are grid noise.
inline constexpr double kAdequacyFraction = 1e-2;

/// Lengths of the excursions of `path`; adequate unless an excursion of
/// non-negligible length ends within the largest length of the horizon.
ZetaResult zeta_of(const GridPath& path);

using GridSimulator = std::function<GridPath(double h, double T, Rng& rng)>;

/// Runs `sim` from the same generator state with T doubled (h fixed) until
/// the result is adequate or `max_doublings` is reached. Advances `rng` past
/// the accepted attempt.
ZetaResult zeta_with_doubling(const GridSimulator& sim, double h, double T, int max_doublings, Rng& rng);

ZetaResult zeta(const LimitTriple& params, const LevySettings& settings, Rng& rng);

ThinnedLevySample limit_classic(const RegimeParams& rp, double h, double T, Rng& rng);
ThinnedLevySample limit_bipartite(const RegimeParams& rp, double h, double T, Rng& rng);

struct InteractingSample {
  GridPath path;                  ///< Z^I
  GridPath z1;                    ///< the Z1 summand
  std::vector<double> passage;    ///< inf{u : Z2(u) < -lambda12 t} at grid times
};

/// Z^I(t) = Z1(t) + lambda12 inf{u : Z2(u) < -lambda12 t}. Z2 is simulated on
/// the same grid and extended until its running minimum passes -lambda12 T.
InteractingSample limit_interacting(const RegimeParams& rp, double h, double T, Rng& rng);

/// Z1 plus jumps lambda12 zeta'_p at Exp(lambda12 zeta'_p) times, with zeta'
/// the excursion lengths of an independent Z2. Excursions beyond the simulated
/// Z2 horizon enter as the drift lambda12^2 t sum zeta'^2 (asymptotic tail).
InteractingSample limit_interacting_merged(const RegimeParams& rp, double h, double T, Rng& rng);

/// Triple whose default horizon is used for a regime's limit simulation.
LimitTriple regime_scale_triple(const RegimeParams& rp);

/// zeta of the regime limit with the defaults and doubling policy of `zeta`.
ZetaResult regime_zeta(const RegimeParams& rp, const LevySettings& settings, Rng& rng);

}  // namespace rank2
