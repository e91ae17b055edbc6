#include "rank2/exploration.hpp"

#include <algorithm>
#include <cmath>

namespace rank2 {

namespace {

// Horizon large enough that U2 o X21 cannot leave the domain of U2 once all
// clocks have fired.
double sufficient_horizon(double s1, double s2, double r12, double r21) {
  return 4.0 * (s1 * (1.0 + r21) + s2 * (1.0 + r12));
}

std::vector<double> draw_clocks(const WeightVector& w, double rate, Rng& rng) {
  std::vector<double> out(w.size());
  for (std::size_t l = 0; l < w.size(); ++l) out[l] = exponential(rng, w[l]) / rate;
  return out;
}

JumpDriftPath counting_path(const WeightVector& w, std::vector<double>& clock, double horizon) {
  std::vector<Jump> jumps;
  jumps.reserve(w.size());
  for (std::size_t l = 0; l < w.size(); ++l) {
    if (clock[l] <= horizon) {
      jumps.push_back({clock[l], w[l]});
    } else {
      clock[l] = kInf;
    }
  }
  return JumpDriftPath(0.0, std::move(jumps), horizon);
}

void assemble(ExplorationBundle& b) {
  b.U2 = first_passage_path(b.X22);
  b.U2_X21 = compose_monotone(b.U2, b.X21);
  const JumpDriftPath coupled = compose_monotone(b.X12, b.U2_X21);
  b.V = add(b.X11.restricted(coupled.horizon()), coupled);
}

}  // namespace

double default_exploration_horizon(const ModelSpec& spec) {
  double h = 0.0;
  for (int i = 0; i < 2; ++i) {
    const WeightVector& w = spec.weights(i);
    const double q = spec.Q[i][i];
    if (w.empty() || !(q > 0.0)) continue;
    h = std::max(h, 2.0 * w.sigma1() * q + 10.0 / q);
  }
  const double q11 = spec.Q[0][0], q22 = spec.Q[1][1], q12 = spec.Q[0][1];
  const double r12 = q11 > 0.0 ? q12 / q11 : 0.0;
  const double r21 = (q22 > 0.0 && !spec.w2.empty()) ? q12 / q22 : 0.0;
  return std::max(h, sufficient_horizon(spec.w1.sigma1(), spec.w2.sigma1(), r12, r21));
}

ExplorationBundle build_exploration(const ModelSpec& spec, Rng& rng, std::optional<double> horizon) {
  const double q11 = spec.Q[0][0], q22 = spec.Q[1][1], q12 = spec.Q[0][1];
  if (!(q11 > 0.0)) throw Error(Errc::ZeroDiagonal, "q11 = 0; reparametrize first");
  const bool has2 = !spec.w2.empty();
  if (has2 && !(q22 > 0.0)) throw Error(Errc::ZeroDiagonal, "q22 = 0; reparametrize first");

  ExplorationBundle b;
  b.horizon = horizon ? *horizon : default_exploration_horizon(spec);
  if (!(b.horizon > 0.0)) throw Error(Errc::InvalidArgument, "horizon must be positive");
  b.clock1 = draw_clocks(spec.w1, q11, rng);
  b.clock2 = has2 ? draw_clocks(spec.w2, q22, rng) : std::vector<double>{};
  b.N1 = counting_path(spec.w1, b.clock1, b.horizon);
  b.N2 = counting_path(spec.w2, b.clock2, b.horizon);
  b.X11 = b.N1.with_drift(-1.0);
  b.X22 = b.N2.with_drift(-1.0);
  b.X12 = has2 ? b.N2.scaled(q12 / q11) : JumpDriftPath::zero(b.horizon);
  b.X21 = has2 ? b.N1.scaled(q12 / q22) : JumpDriftPath::zero(b.horizon);
  assemble(b);
  return b;
}

ExplorationBundle build_exploration_tilde(const WeightVector& w1, const WeightVector& w2, Vec2 eps, double q,
                                          Rng& rng, double horizon) {
  if (!(q > 0.0)) throw Error(Errc::NotBipartite, "shared clock rate must be positive");
  if (!(eps[0] >= 0.0 && eps[1] >= 0.0)) throw Error(Errc::InvalidArgument, "eps must be >= 0");
  if (!(horizon > 0.0)) throw Error(Errc::InvalidArgument, "horizon must be positive");
  ExplorationBundle b;
  b.horizon = horizon;
  b.eps = eps;
  b.clock1 = draw_clocks(w1, q, rng);
  b.clock2 = draw_clocks(w2, q, rng);
  b.N1 = counting_path(w1, b.clock1, horizon);
  b.N2 = counting_path(w2, b.clock2, horizon);
  b.X21 = b.N1;
  b.X12 = b.N2;
  b.X11 = b.N1.scaled(eps[0]).with_drift(-1.0);
  b.X22 = b.N2.scaled(eps[1]).with_drift(-1.0);
  assemble(b);
  return b;
}

ExplorationBundle build_exploration_bp(const ModelSpec& spec, Rng& rng, std::optional<double> delta,
                                       std::optional<double> horizon) {
  const double d = delta ? *delta : default_bipartite_delta(spec);
  const BipartiteReparam rp = bipartite_reparam(spec, d);
  double h = 0.0;
  if (horizon) {
    h = *horizon;
  } else {
    for (int i = 0; i < 2; ++i) {
      const WeightVector& w = spec.weights(i);
      if (!w.empty()) h = std::max(h, 2.0 * w.sigma1() * rp.q + 10.0 * rp.eps[i] / rp.q);
    }
    h = std::max(h, sufficient_horizon(spec.w1.sigma1(), spec.w2.sigma1(), 1.0, 1.0));
  }
  return build_exploration_tilde(spec.w1, spec.w2, rp.eps, rp.q, rng, h);
}

// ---------------------------------------------------------------------------
// Additive fields

const JumpDriftPath& AdditiveField::get(int j, int i) const {
  if (j == 0) return i == 0 ? f11 : f12;
  return i == 0 ? f21 : f22;
}

void AdditiveField::validate() const {
  if (f12.drift() < 0.0 || f21.drift() < 0.0)
    throw Error(Errc::InvalidArgument, "off-diagonal field components must be non-decreasing");
}

double first_left_hit(const JumpDriftPath& f, double level, double after) {
  if (level > 0.0) throw Error(Errc::InvalidArgument, "hitting level must be <= 0");
  if (after == 0.0 && level == 0.0) return 0.0;
  if (!(after <= f.horizon())) return kInf;
  // Already at the level from the left, possibly just before a jump at `after`.
  if (after > 0.0 && f.eval_left(after) <= level) return after;
  const double d = f.drift();
  if (!(d < 0.0)) return kInf;
  const auto js = f.jumps();
  // Segment origin: last jump at or before `after`.
  auto it = std::upper_bound(js.begin(), js.end(), after, [](double x, const Jump& j) { return x < j.time; });
  double s = it == js.begin() ? 0.0 : std::prev(it)->time;
  while (true) {
    const double e = it == js.end() ? f.horizon() : it->time;
    const double hit = s + (f.eval(s) - level) / (-d);
    if (hit <= e) return std::max(hit, after);
    if (it == js.end()) return kInf;
    s = e;
    ++it;
  }
}

namespace {

double left_value(const JumpDriftPath& f, double t) {
  if (t == kInf) return f.eval(f.horizon());
  return f.eval_left(std::min(t, f.horizon()));
}

}  // namespace

FieldHittingResult field_hitting_time(const AdditiveField& F, Vec2 r, std::size_t max_iter, double tol) {
  F.validate();
  if (!(r[0] >= 0.0 && r[1] >= 0.0)) throw Error(Errc::InvalidArgument, "r must be >= 0");
  FieldHittingResult res;
  Vec2 u{0.0, 0.0};
  res.iterates.push_back(u);
  const bool exact = F.f12.drift() == 0.0 && F.f21.drift() == 0.0;
  for (std::size_t it = 0; it < max_iter; ++it) {
    Vec2 next{};
    for (int j = 0; j < 2; ++j) {
      const int i = 1 - j;
      if (u[j] == kInf) {
        next[j] = kInf;
        continue;
      }
      const double v = r[j] + left_value(F.get(j, i), u[i]);
      next[j] = first_left_hit(F.get(j, j), -v, u[j]);
    }
    res.iterates.push_back(next);
    const bool same = next == u;
    bool small = false;
    if (!exact && tol > 0.0) {
      small = true;
      for (int j = 0; j < 2; ++j) {
        if (next[j] == kInf && u[j] == kInf) continue;
        if (!(std::abs(next[j] - u[j]) <= tol * std::max(1.0, std::abs(next[j])))) small = false;
      }
    }
    u = next;
    if (same || small) {
      res.T = u;
      return res;
    }
  }
  res.T = u;
  res.converged = false;
  return res;
}

Vec2 single_process_T1(const AdditiveField& F, double r) {
  F.validate();
  if (!(r > 0.0)) throw Error(Errc::InvalidArgument, "r must be > 0");
  if (F.f21.drift() != 0.0) throw Error(Errc::InvalidArgument, "f21 must be pure jump");
  const auto js = F.f21.jumps();
  const double H = F.f21.horizon();
  // f21(t-) is constant on (b_p, b_{p+1}] with value f21(b_p).
  std::vector<double> bounds{0.0};
  for (const Jump& j : js)
    if (j.time > 0.0) bounds.push_back(j.time);
  for (std::size_t p = 0; p < bounds.size(); ++p) {
    const double lo = bounds[p];
    const double hi = p + 1 < bounds.size() ? bounds[p + 1] : kInf;
    if (lo > F.f11.horizon()) break;
    const double c = F.f21.eval(std::min(lo, H));
    const double t2 = tau(F.f22, c);
    const double g = left_value(F.f12, t2);
    const double v = r + g;
    const double hit = first_left_hit(F.f11, -v, lo);
    if (hit <= hi && hit != kInf) return {hit, t2};
  }
  return {kInf, tau(F.f22, F.f21.eval(H))};
}

AdditiveField field_of(const ExplorationBundle& b) { return {b.X11, b.X12, b.X21, b.X22}; }

}  // namespace rank2
