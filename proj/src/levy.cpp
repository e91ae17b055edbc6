#include "rank2/levy.hpp"

#include <algorithm>
#include <cmath>

namespace rank2 {

std::size_t truncation_index(std::span<const double> theta) {
  const std::size_t n = theta.size();
  std::vector<double> suffix(n + 1, 0.0);
  for (std::size_t p = n; p-- > 0;) suffix[p] = suffix[p + 1] + theta[p] * theta[p] * theta[p];
  const double threshold = 1e-6 * suffix[0];
  for (std::size_t p = 0; p <= n; ++p)
    if (suffix[p] < threshold || suffix[p] == 0.0) return p;
  return n;
}

namespace {

std::vector<Jump> draw_atoms(std::span<const double> theta, Rng& rng) {
  std::vector<Jump> out;
  out.reserve(theta.size());
  for (double th : theta) {
    if (!(th > 0.0)) continue;
    out.push_back({exponential(rng, th), th});
  }
  return out;
}

double square_sum(std::span<const double> theta) {
  CompensatedSum acc;
  for (double th : theta) acc.add(th * th);
  return acc.value();
}

std::vector<Jump> within(std::vector<Jump> atoms, double T) {
  std::erase_if(atoms, [T](const Jump& j) { return j.time > T; });
  return atoms;
}

}  // namespace

JumpDriftPath simulate_J(std::span<const double> theta, double T, Rng& rng) {
  if (!(T > 0.0)) throw Error(Errc::InvalidArgument, "T must be positive");
  return JumpDriftPath(-square_sum(theta), within(draw_atoms(theta, rng), T), T);
}

ThinnedLevySample simulate_W(const LimitTriple& params, double h, double T, Rng& rng) {
  params.validate();
  if (!(h > 0.0) || !(T > 0.0)) throw Error(Errc::InvalidArgument, "h and T must be positive");
  ThinnedLevySample out;
  out.params = params;
  out.truncation = truncation_index(params.theta);
  const std::span<const double> kept(params.theta.data(), out.truncation);
  for (std::size_t p = out.truncation; p < params.theta.size(); ++p) out.dropped_l3 += std::pow(params.theta[p], 3);

  const auto n = static_cast<std::size_t>(std::ceil(T / h - 1e-9));
  const double horizon = static_cast<double>(n) * h;
  std::vector<Jump> atoms = within(draw_atoms(kept, rng), horizon);

  const double beta = params.beta;
  const double slope = params.lambda - square_sum(kept);
  std::vector<double> values(n + 1);
  std::normal_distribution<double> normal(0.0, std::sqrt(beta * h));
  double b = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    if (k > 0 && beta > 0.0) b += normal(rng);
    const double t = static_cast<double>(k) * h;
    values[k] = b + slope * t - 0.5 * beta * t * t;
  }
  out.path = GridPath(h, std::move(values), std::move(atoms));
  return out;
}

double default_levy_horizon(const LimitTriple& params) {
  double beta_eff = params.beta;
  for (double th : params.theta) beta_eff += th * th * th;
  if (!(beta_eff > 0.0)) return 15.0;
  return 15.0 * (std::cbrt(1.0 / beta_eff) + 2.0 * std::max(params.lambda, 0.0) / beta_eff);
}

ZetaResult zeta_of(const GridPath& path) {
  const ExcursionSet e = extract_excursions(path);
  ZetaResult z;
  z.lengths = lengths_desc(e);
  z.horizon = path.horizon();
  z.step = path.step();
  if (z.lengths.empty()) return z;
  const double largest = z.lengths.front();
  const double threshold = kAdequacyFraction * largest;
  for (const Excursion& x : e.intervals) {
    if (x.length() < threshold) continue;
    if (x.censored || x.right > z.horizon - largest) z.adequate = false;
  }
  return z;
}

ZetaResult zeta_with_doubling(const GridSimulator& sim, double h, double T, int max_doublings, Rng& rng) {
  const Rng start = rng;
  for (int d = 0;; ++d) {
    Rng r = start;
    ZetaResult z = zeta_of(sim(h, T * std::ldexp(1.0, d), r));
    z.doublings = d;
    if (z.adequate || d >= max_doublings) {
      rng = r;
      return z;
    }
  }
}

ZetaResult zeta(const LimitTriple& params, const LevySettings& settings, Rng& rng) {
  const double T = settings.T ? *settings.T : default_levy_horizon(params);
  const double h = settings.h ? *settings.h : 1e-4 * T;
  return zeta_with_doubling([&](double hh, double TT, Rng& r) { return simulate_W(params, hh, TT, r).path; }, h, T,
                            settings.max_doublings, rng);
}

ThinnedLevySample limit_classic(const RegimeParams& rp, double h, double T, Rng& rng) {
  return simulate_W(rp.classic().limit, h, T, rng);
}

ThinnedLevySample limit_bipartite(const RegimeParams& rp, double h, double T, Rng& rng) {
  return simulate_W(rp.bipartite().limit, h, T, rng);
}

namespace {

struct PassageSource {
  std::vector<double> times;
  std::vector<double> running_min;
  GridPath path;
};

// Simulates Z2 on step h, doubling its horizon until the running minimum
// drops below `level`.
PassageSource passage_source(const LimitTriple& z2, double h, double T, double level, Rng& rng) {
  const Rng start = rng;
  double T2 = T;
  for (int attempt = 0; attempt < 24; ++attempt, T2 *= 2.0) {
    Rng r = start;
    ThinnedLevySample s = simulate_W(z2, h, T2, r);
    PassageSource src;
    double m = kInf;
    for (const GridPath::Event& e : s.path.events()) {
      m = std::min(m, e.value);
      src.times.push_back(e.time);
      src.running_min.push_back(m);
    }
    if (m < level) {
      rng = r;
      src.path = std::move(s.path);
      return src;
    }
  }
  throw Error(Errc::InvalidArgument, "Z2 does not reach the passage level; regime limit is degenerate");
}

// sum of zeta^2 over excursions of W starting after t0. Each level dL
// carries Brownian excursions with E zeta^2 = beta / mu^3 at local downward
// drift mu, and dL = mu dt, so the tail is the integral of beta / mu^2.
// Late-time drift: mu = beta t - lambda + sum theta^2 (1 - e^{-theta t}).
double excursion_square_tail(const LimitTriple& z, double t0) {
  if (z.beta <= 0.0) return 0.0;
  double jump = 0.0;
  for (double th : z.theta) jump += th * th * (1.0 - std::exp(-th * t0));
  const double mu = z.beta * t0 - z.lambda + jump;
  return mu > 0.0 ? 1.0 / mu : 0.0;
}

double passage_at(const PassageSource& src, double level) {
  auto it = std::partition_point(src.running_min.begin(), src.running_min.end(), [level](double x) { return x >= level; });
  if (it == src.running_min.end()) return kInf;
  return src.times[static_cast<std::size_t>(it - src.running_min.begin())];
}

}  // namespace

InteractingSample limit_interacting(const RegimeParams& rp, double h, double T, Rng& rng) {
  const InteractingParams& ip = rp.interacting();
  Rng r1(rng());
  Rng r2(rng());
  InteractingSample out;
  out.z1 = simulate_W(ip.z[0], h, T, r1).path;
  const auto z1v = out.z1.values();
  out.passage.assign(z1v.size(), 0.0);
  if (ip.lambda12 == 0.0) {
    out.path = out.z1;
    return out;
  }
  const double l12 = ip.lambda12;
  const PassageSource src = passage_source(ip.z[1], h, T, -l12 * out.z1.horizon(), r2);
  std::vector<double> values(z1v.size());
  for (std::size_t k = 0; k < z1v.size(); ++k) {
    const double t = static_cast<double>(k) * h;
    out.passage[k] = passage_at(src, -l12 * t);
    values[k] = z1v[k] + l12 * out.passage[k];
  }
  std::vector<Jump> overlay(out.z1.overlay().begin(), out.z1.overlay().end());
  out.path = GridPath(h, std::move(values), std::move(overlay));
  return out;
}

InteractingSample limit_interacting_merged(const RegimeParams& rp, double h, double T, Rng& rng) {
  const InteractingParams& ip = rp.interacting();
  Rng r1(rng());
  Rng r2(rng());
  Rng r3(rng());
  InteractingSample out;
  out.z1 = simulate_W(ip.z[0], h, T, r1).path;
  std::vector<Jump> overlay(out.z1.overlay().begin(), out.z1.overlay().end());
  std::vector<double> values(out.z1.values().begin(), out.z1.values().end());
  const double l12 = ip.lambda12;
  if (l12 > 0.0) {
    const double H = out.z1.horizon();
    // Every excursion of Z2 carries a clock, so the whole simulated path is used.
    const PassageSource src = passage_source(ip.z[1], h, T, -l12 * H, r2);
    const ExcursionSet e = extract_excursions(src.path);
    for (const Excursion& x : e.intervals) {
      if (x.censored) continue;
      const double theta = l12 * x.length();
      const double xi = exponential(r3, theta);
      if (xi <= H) overlay.push_back({xi, theta});
    }
    // Excursions past the simulated horizon are short and many; their atoms
    // fire at rate lambda12 zeta', which in sum is a drift.
    const double tail = excursion_square_tail(ip.z[1], src.path.horizon());
    for (std::size_t k = 0; k < values.size(); ++k) values[k] += l12 * l12 * tail * static_cast<double>(k) * h;
  }
  out.path = GridPath(h, std::move(values), std::move(overlay));
  return out;
}

LimitTriple regime_scale_triple(const RegimeParams& rp) {
  switch (rp.tag()) {
    case Regime::Classic: return rp.classic().limit;
    case Regime::Bipartite: return rp.bipartite().limit;
    case Regime::Interacting: {
      LimitTriple t = rp.interacting().z[0];
      t.lambda += 2.0 * rp.interacting().lambda12;
      return t;
    }
  }
  throw Error(Errc::InvalidArgument, "unknown regime");
}

ZetaResult regime_zeta(const RegimeParams& rp, const LevySettings& settings, Rng& rng) {
  const double T = settings.T ? *settings.T : default_levy_horizon(regime_scale_triple(rp));
  const double h = settings.h ? *settings.h : 1e-4 * T;
  GridSimulator sim;
  switch (rp.tag()) {
    case Regime::Classic:
      sim = [&](double hh, double TT, Rng& r) { return limit_classic(rp, hh, TT, r).path; };
      break;
    case Regime::Bipartite:
      sim = [&](double hh, double TT, Rng& r) { return limit_bipartite(rp, hh, TT, r).path; };
      break;
    case Regime::Interacting:
      sim = [&](double hh, double TT, Rng& r) { return limit_interacting(rp, hh, TT, r).path; };
      break;
  }
  return zeta_with_doubling(sim, h, T, settings.max_doublings, rng);
}

}  // namespace rank2
