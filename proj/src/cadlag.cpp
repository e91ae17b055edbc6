#include "rank2/cadlag.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace rank2 {

namespace {

// Sort by time, merge equal times, drop zero sizes. Throws on negative or
// non-finite sizes and on times outside [0, horizon].
std::vector<Jump> normalize_jumps(std::vector<Jump> jumps, double horizon) {
  for (const Jump& j : jumps) {
    if (!std::isfinite(j.size) || j.size < 0.0) throw Error(Errc::InvalidArgument, "jump sizes must be finite and >= 0");
    if (!(j.time >= 0.0 && j.time <= horizon)) throw Error(Errc::InvalidArgument, "jump time outside [0, horizon]");
  }
  if (!std::is_sorted(jumps.begin(), jumps.end(), [](const Jump& a, const Jump& b) { return a.time < b.time; }))
    std::stable_sort(jumps.begin(), jumps.end(), [](const Jump& a, const Jump& b) { return a.time < b.time; });
  std::vector<Jump> out;
  out.reserve(jumps.size());
  for (const Jump& j : jumps) {
    if (j.size == 0.0) continue;
    if (!out.empty() && out.back().time == j.time) {
      out.back().size += j.size;
    } else {
      out.push_back(j);
    }
  }
  return out;
}

std::vector<double> prefix_sums(std::span<const Jump> jumps) {
  std::vector<double> prefix(jumps.size());
  CompensatedSum acc;
  for (std::size_t k = 0; k < jumps.size(); ++k) {
    acc.add(jumps[k].size);
    prefix[k] = acc.value();
  }
  return prefix;
}

double mass_upto(std::span<const Jump> jumps, std::span<const double> prefix, double t, bool strict) {
  auto it = strict ? std::lower_bound(jumps.begin(), jumps.end(), t,
                                      [](const Jump& j, double x) { return j.time < x; })
                   : std::upper_bound(jumps.begin(), jumps.end(), t,
                                      [](double x, const Jump& j) { return x < j.time; });
  const auto k = static_cast<std::size_t>(it - jumps.begin());
  return k == 0 ? 0.0 : prefix[k - 1];
}

}  // namespace

// ---------------------------------------------------------------------------
// JumpDriftPath

JumpDriftPath::JumpDriftPath(double drift, std::vector<Jump> jumps, double horizon, bool truncated)
    : drift_(drift), horizon_(horizon), truncated_(truncated) {
  if (!std::isfinite(drift)) throw Error(Errc::InvalidArgument, "drift must be finite");
  if (!(horizon >= 0.0)) throw Error(Errc::InvalidArgument, "horizon must be >= 0");
  jumps_ = normalize_jumps(std::move(jumps), horizon);
  prefix_ = prefix_sums(jumps_);
}

void JumpDriftPath::check_domain(double t) const {
  if (!(t >= 0.0 && t <= horizon_)) throw Error(Errc::OutOfDomain, "t = " + std::to_string(t) + " outside [0, horizon]");
}

double JumpDriftPath::jump_mass(double t, bool strict) const { return mass_upto(jumps_, prefix_, t, strict); }

double JumpDriftPath::eval(double t) const {
  check_domain(t);
  return drift_ * t + jump_mass(t, false);
}

double JumpDriftPath::eval_left(double t) const {
  check_domain(t);
  return drift_ * t + jump_mass(t, true);
}

JumpDriftPath JumpDriftPath::scaled(double factor) const {
  if (!(factor >= 0.0)) throw Error(Errc::InvalidArgument, "scale factor must be >= 0");
  std::vector<Jump> js(jumps_.begin(), jumps_.end());
  for (Jump& j : js) j.size *= factor;
  return JumpDriftPath(drift_ * factor, std::move(js), horizon_, truncated_);
}

JumpDriftPath JumpDriftPath::with_drift(double drift) const {
  return JumpDriftPath(drift, std::vector<Jump>(jumps_.begin(), jumps_.end()), horizon_, truncated_);
}

JumpDriftPath JumpDriftPath::restricted(double h) const {
  if (!(h >= 0.0 && h <= horizon_)) throw Error(Errc::InvalidArgument, "restriction beyond horizon");
  std::vector<Jump> js;
  for (const Jump& j : jumps_) {
    if (j.time > h) break;
    js.push_back(j);
  }
  return JumpDriftPath(drift_, std::move(js), h, truncated_);
}

// ---------------------------------------------------------------------------
// GridPath

GridPath::GridPath(double step, std::vector<double> values, std::vector<Jump> overlay)
    : step_(step), values_(std::move(values)) {
  if (!(step > 0.0) || !std::isfinite(step)) throw Error(Errc::InvalidArgument, "grid step must be positive");
  if (values_.empty()) throw Error(Errc::InvalidArgument, "grid path needs at least one value");
  overlay_ = normalize_jumps(std::move(overlay), horizon());
  prefix_ = prefix_sums(overlay_);
}

std::size_t GridPath::cell(double t) const {
  if (!(t >= 0.0 && t <= horizon())) throw Error(Errc::OutOfDomain, "t outside grid horizon");
  const std::size_t last = values_.size() - 1;
  auto k = static_cast<std::size_t>(std::floor(t / step_));
  if (k > last) k = last;
  while (k > 0 && static_cast<double>(k) * step_ > t) --k;
  while (k < last && static_cast<double>(k + 1) * step_ <= t) ++k;
  return k;
}

double GridPath::eval(double t) const { return values_[cell(t)] + mass_upto(overlay_, prefix_, t, false); }

double GridPath::eval_left(double t) const {
  std::size_t k = cell(t);
  if (k > 0 && static_cast<double>(k) * step_ == t) --k;
  return values_[k] + mass_upto(overlay_, prefix_, t, true);
}

namespace {

// Calls fn(time, value, is_jump) at every grid point and overlay jump time in
// increasing order; a jump landing on a grid point is reported once.
template <class Fn>
void for_each_event(std::span<const double> values, double step, std::span<const Jump> overlay, Fn&& fn) {
  const std::size_t n = values.size();
  std::size_t j = 0;
  double mass = 0.0;
  CompensatedSum acc;
  for (std::size_t k = 0; k < n; ++k) {
    const double tk = static_cast<double>(k) * step;
    while (j < overlay.size() && overlay[j].time < tk) {
      acc.add(overlay[j].size);
      mass = acc.value();
      fn(overlay[j].time, values[k - 1] + mass, true);
      ++j;
    }
    bool jump_here = false;
    while (j < overlay.size() && overlay[j].time == tk) {
      acc.add(overlay[j].size);
      mass = acc.value();
      jump_here = true;
      ++j;
    }
    fn(tk, values[k] + mass, jump_here);
  }
}

}  // namespace

std::vector<GridPath::Event> GridPath::events() const {
  std::vector<Event> out;
  out.reserve(values_.size() + overlay_.size());
  for_each_event(values_, step_, overlay_, [&](double t, double v, bool j) { out.push_back({t, v, j}); });
  return out;
}

GridPath GridPath::restricted(double h) const {
  const std::size_t k = cell(h);
  std::vector<double> vals(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(k + 1));
  const double end = static_cast<double>(k) * step_;
  std::vector<Jump> js;
  for (const Jump& j : overlay_)
    if (j.time <= end) js.push_back(j);
  return GridPath(step_, std::move(vals), std::move(js));
}

// ---------------------------------------------------------------------------
// Running minimum and excursions of jump paths

double PiecewiseLinear::eval(double t) const {
  if (times.empty()) throw Error(Errc::OutOfDomain, "empty piecewise-linear path");
  if (!(t >= times.front() && t <= times.back())) throw Error(Errc::OutOfDomain, "t outside breakpoints");
  auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.end()) return values.back();
  const auto k = static_cast<std::size_t>(it - times.begin());
  const double t0 = times[k - 1], t1 = times[k];
  if (t1 == t0) return values[k];
  return values[k - 1] + (values[k] - values[k - 1]) * (t - t0) / (t1 - t0);
}

namespace {

struct MinWalk {
  std::vector<Excursion> excursions;
  std::vector<double> excursion_min;  // running min during each excursion
  PiecewiseLinear minimum;
};

MinWalk walk_minimum(const JumpDriftPath& f) {
  MinWalk w;
  const double d = f.drift();
  const double H = f.horizon();
  const auto jumps = f.jumps();

  double m = f.eval(0.0);
  w.minimum.times.push_back(0.0);
  w.minimum.values.push_back(m);

  bool in_exc = false;
  double l = 0.0;
  double s = 0.0;
  std::size_t k = (!jumps.empty() && jumps.front().time == 0.0) ? 1 : 0;

  auto close = [&](double r, bool censored) {
    w.excursions.push_back({l, r, censored});
    w.excursion_min.push_back(m);
    in_exc = false;
  };

  while (true) {
    const bool has_jump = k < jumps.size();
    const double e = has_jump ? jumps[k].time : H;
    const double xs = f.eval(s);
    const double xe = e > s ? f.eval_left(e) : xs;
    bool closes_at_e = false;
    if (in_exc) {
      if (d < 0.0 && xe <= m) {
        const double r = std::clamp(s + (xs - m) / (-d), s, e);
        if (r < e) {
          close(r, false);
          w.minimum.times.push_back(r);
          w.minimum.values.push_back(m);
          m = xe;
        } else {
          closes_at_e = true;
        }
      }
    } else if (d > 0.0 && e > s) {
      in_exc = true;
      l = s;
    } else {
      m = xe;
    }
    w.minimum.times.push_back(e);
    w.minimum.values.push_back(m);
    if (!has_jump) {
      if (in_exc) close(H, !closes_at_e);
      break;
    }
    // A jump landing exactly where an excursion closes continues it.
    if (!in_exc) {
      in_exc = true;
      l = e;
    }
    s = e;
    ++k;
  }
  return w;
}

}  // namespace

PiecewiseLinear running_min(const JumpDriftPath& path) { return walk_minimum(path).minimum; }

JumpDriftPath first_passage_path(const JumpDriftPath& path) {
  const double d = path.drift();
  if (!(d < 0.0)) throw Error(Errc::InvalidArgument, "first passage path needs negative drift");
  const MinWalk w = walk_minimum(path);
  const double L0 = -w.minimum.values.front();
  const double LH = -w.minimum.values.back();
  const double horizon = std::max(LH, 0.0);
  std::vector<Jump> jumps;
  jumps.reserve(w.excursions.size() + 1);
  if (L0 < 0.0) jumps.push_back({0.0, -L0 / (-d)});
  for (std::size_t i = 0; i < w.excursions.size(); ++i) {
    const double level = std::clamp(-w.excursion_min[i], 0.0, horizon);
    jumps.push_back({level, w.excursions[i].length()});
  }
  return JumpDriftPath(1.0 / (-d), std::move(jumps), horizon, path.truncated());
}

double first_passage(const JumpDriftPath& path, double y) {
  const double d = path.drift();
  const PiecewiseLinear m = running_min(path);
  const double LH = -m.values.back();
  if (y >= LH) return kInf;
  if (y < -m.values.front()) return 0.0;
  if (!(d < 0.0)) return kInf;
  return first_passage_path(path).eval(std::max(y, 0.0));
}

ExcursionSet extract_excursions(const JumpDriftPath& path) {
  return {walk_minimum(path).excursions, path.horizon()};
}

ExcursionSet extract_excursions(const GridPath& path) {
  ExcursionSet out;
  out.horizon = path.horizon();
  bool first = true;
  bool in_exc = false;
  double m = 0.0, l = 0.0;
  for_each_event(path.values(), path.step(), path.overlay(), [&](double t, double v, bool) {
    if (first) {
      m = v;
      first = false;
      return;
    }
    if (v > m) {
      if (!in_exc) {
        in_exc = true;
        l = t;
      }
    } else {
      if (in_exc) {
        out.intervals.push_back({l, t, false});
        in_exc = false;
      }
      m = v;
    }
  });
  if (in_exc) out.intervals.push_back({l, out.horizon, true});
  return out;
}

std::vector<double> lengths_desc(const ExcursionSet& e) {
  std::vector<double> out;
  out.reserve(e.intervals.size());
  for (const Excursion& x : e.intervals) out.push_back(x.length());
  std::stable_sort(out.begin(), out.end(), std::greater<>());
  return out;
}

std::vector<ExcursionMark> excursion_marks(const ExcursionSet& e, const JumpDriftPath& phi) {
  std::vector<ExcursionMark> out;
  out.reserve(e.intervals.size());
  for (const Excursion& x : e.intervals)
    out.push_back({x.left, x.length(), phi.eval(x.right) - phi.eval_left(x.left)});
  return out;
}

// ---------------------------------------------------------------------------
// Composition and sums

JumpDriftPath compose_monotone(const JumpDriftPath& outer, const JumpDriftPath& inner) {
  const double a = outer.drift();
  const double b = inner.drift();
  if (b < 0.0) throw Error(Errc::InvalidArgument, "inner path must be non-decreasing");
  const double Ho = outer.horizon();
  const auto ijumps = inner.jumps();
  const auto ojumps = outer.jumps();

  std::vector<Jump> out;
  double horizon = inner.horizon();
  bool truncated = inner.truncated();

  auto push = [&](double t, double size) {
    if (size < 0.0) {
      // Rounding noise on an exactly flat step is tolerated; genuine decreases are not.
      if (size < -1e-12 * (1.0 + std::abs(outer.eval(std::min(Ho, inner.eval(t))))))
        throw Error(Errc::InvalidArgument, "composition produced a downward jump");
      return;
    }
    out.push_back({t, size});
  };

  const double v0 = inner.eval(0.0);
  if (v0 > Ho) return JumpDriftPath(0.0, {}, 0.0, true);
  push(0.0, outer.eval(v0));

  std::size_t k = (!ijumps.empty() && ijumps.front().time == 0.0) ? 1 : 0;
  double s = 0.0;
  while (true) {
    const bool has_jump = k < ijumps.size();
    const double e = has_jump ? ijumps[k].time : inner.horizon();
    const double vs = inner.eval(s);
    const double vl = has_jump ? inner.eval_left(e) : inner.eval(e);
    if (b > 0.0) {
      const bool crosses = vl > Ho;
      const double upper = crosses ? Ho : vl;
      // Outer jumps strictly after vs map into the segment; the one at the
      // segment's left limit belongs to the inner jump at e (if any).
      auto it = std::upper_bound(ojumps.begin(), ojumps.end(), vs, [](double x, const Jump& j) { return x < j.time; });
      for (; it != ojumps.end(); ++it) {
        const double sigma = it->time;
        if (sigma > upper || (sigma == upper && has_jump && !crosses)) break;
        push(std::clamp(s + (sigma - vs) / b, s, e), it->size);
      }
      if (crosses) {
        horizon = std::clamp(s + (Ho - vs) / b, s, e);
        truncated = true;
        break;
      }
    }
    if (!has_jump) break;
    const double ve = inner.eval(e);
    if (ve > Ho) {
      horizon = e;
      truncated = true;
      break;
    }
    const double left = b > 0.0 ? outer.eval_left(vl) : outer.eval(vl);
    push(e, outer.eval(ve) - left);
    s = e;
    ++k;
  }
  // Jumps mapped onto a truncated horizon may sit just past it after rounding.
  for (Jump& j : out) j.time = std::min(j.time, horizon);
  return JumpDriftPath(a * b, std::move(out), horizon, truncated);
}

JumpDriftPath add(const JumpDriftPath& p, const JumpDriftPath& q) {
  if (p.horizon() != q.horizon()) throw Error(Errc::HorizonMismatch, "paths have different horizons");
  std::vector<Jump> js;
  js.reserve(p.jumps().size() + q.jumps().size());
  std::merge(p.jumps().begin(), p.jumps().end(), q.jumps().begin(), q.jumps().end(), std::back_inserter(js),
             [](const Jump& a, const Jump& b) { return a.time < b.time; });
  return JumpDriftPath(p.drift() + q.drift(), std::move(js), p.horizon(), p.truncated() || q.truncated());
}

// ---------------------------------------------------------------------------
// Diagnostics and dumps

namespace {

template <class Path>
GoodnessReport make_report(const Path& p, double horizon, double tol) {
  const ExcursionSet e = extract_excursions(p);
  GoodnessReport g;
  g.excursions = e.intervals.size();
  CompensatedSum covered;
  std::vector<double> rights;
  for (const Excursion& x : e.intervals) {
    covered.add(x.length());
    if (!x.censored) {
      g.max_right_jump = std::max(g.max_right_jump, std::abs(p.eval(x.right) - p.eval_left(x.right)));
      rights.push_back(x.right);
    }
  }
  g.complement_measure = std::max(0.0, horizon - covered.value());
  const auto lengths = lengths_desc(e);
  for (int k = 1; k <= 6; ++k) {
    const double eps = horizon * std::pow(10.0, -k);
    if (eps < tol && k > 1) break;
    g.eps.push_back(eps);
    g.count_at_least.push_back(static_cast<std::size_t>(
        std::count_if(lengths.begin(), lengths.end(), [eps](double x) { return x >= eps; })));
  }
  if (rights.size() >= 2) {
    std::vector<double> gaps;
    for (std::size_t i = 1; i < rights.size(); ++i) gaps.push_back(rights[i] - rights[i - 1]);
    std::sort(gaps.begin(), gaps.end());
    g.min_right_gap = gaps.front();
    g.median_right_gap = gaps[gaps.size() / 2];
    g.right_gaps_below_tol =
        static_cast<std::size_t>(std::count_if(gaps.begin(), gaps.end(), [tol](double x) { return x < tol; }));
  }
  return g;
}

}  // namespace

GoodnessReport goodness_report(const JumpDriftPath& path, double horizon, double tol) {
  const double h = std::min(horizon, path.horizon());
  return make_report(path.restricted(h), h, tol);
}

GoodnessReport goodness_report(const GridPath& path, double horizon, double tol) {
  const double h = std::min(horizon, path.horizon());
  const GridPath p = path.restricted(h);
  return make_report(p, p.horizon(), tol);
}

void write_path_csv(std::ostream& os, const JumpDriftPath& path) {
  os << "time,value,is_jump\n";
  const auto js = path.jumps();
  const bool jump0 = !js.empty() && js.front().time == 0.0;
  os << 0.0 << ',' << path.eval(0.0) << ',' << (jump0 ? 1 : 0) << '\n';
  for (const Jump& j : js) {
    if (j.time == 0.0) continue;
    os << j.time << ',' << path.eval(j.time) << ",1\n";
  }
  if (js.empty() || js.back().time < path.horizon())
    os << path.horizon() << ',' << path.eval(path.horizon()) << ",0\n";
}

void write_path_csv(std::ostream& os, const GridPath& path) {
  os << "time,value,is_jump\n";
  for_each_event(path.values(), path.step(), path.overlay(),
                 [&](double t, double v, bool j) { os << t << ',' << v << ',' << (j ? 1 : 0) << '\n'; });
}

}  // namespace rank2
