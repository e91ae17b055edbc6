#pragma once

// Cadlag path algebra: jump-plus-drift paths, grid paths with a jump
// overlay, running minima, first passages, monotone composition and
// excursion extraction.

#include <iosfwd>
#include <span>
#include <vector>

#include "rank2/core.hpp"

namespace rank2 {

struct Jump {
  double time = 0.0;
  double size = 0.0;
};

/// drift * t plus finitely many positive jumps on [0, horizon].
///
/// A jump at time 0 encodes a non-zero initial value; the left limit at 0 is
/// always 0. Simultaneous jumps are merged and zero-size jumps dropped.
class JumpDriftPath {
 public:
  JumpDriftPath() = default;
  JumpDriftPath(double drift, std::vector<Jump> jumps, double horizon, bool truncated = false);

  static JumpDriftPath zero(double horizon) { return JumpDriftPath(0.0, {}, horizon); }

  double drift() const noexcept { return drift_; }
  std::span<const Jump> jumps() const noexcept { return jumps_; }
  double horizon() const noexcept { return horizon_; }
  /// Set when the path was cut short because an inner path left the domain.
  bool truncated() const noexcept { return truncated_; }

  double eval(double t) const;
  double eval_left(double t) const;
  /// Sum of jump sizes with time <= t (or < t when `strict`).
  double jump_mass(double t, bool strict = false) const;
  double total_jump_mass() const noexcept { return prefix_.empty() ? 0.0 : prefix_.back(); }

  JumpDriftPath scaled(double factor) const;
  JumpDriftPath with_drift(double drift) const;
  /// Same path on [0, h], h <= horizon; jumps after h are dropped.
  JumpDriftPath restricted(double h) const;

 private:
  void check_domain(double t) const;

  double drift_ = 0.0;
  std::vector<Jump> jumps_;
  std::vector<double> prefix_;  // prefix_[k] = sum of the first k+1 jump sizes
  double horizon_ = 0.0;
  bool truncated_ = false;
};

/// Values on the grid k*h, k = 0..N, plus an exact jump overlay. The value at
/// t is values[floor(t/h)] plus overlay jumps at times <= t.
class GridPath {
 public:
  GridPath() = default;
  GridPath(double step, std::vector<double> values, std::vector<Jump> overlay);

  double step() const noexcept { return step_; }
  double horizon() const noexcept { return step_ * static_cast<double>(values_.size() - 1); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const Jump> overlay() const noexcept { return overlay_; }

  double eval(double t) const;
  double eval_left(double t) const;
  /// Index of the grid cell containing t.
  std::size_t cell(double t) const;

  /// Event times (grid points and overlay jumps) with the path value there.
  struct Event {
    double time;
    double value;
    bool is_jump;
  };
  std::vector<Event> events() const;

  GridPath restricted(double h) const;

 private:
  double step_ = 1.0;
  std::vector<double> values_{0.0};
  std::vector<Jump> overlay_;
  std::vector<double> prefix_;
};

/// Breakpoints of a continuous piecewise-linear path (linear interpolation).
struct PiecewiseLinear {
  std::vector<double> times;
  std::vector<double> values;

  double eval(double t) const;
};

/// t -> inf_{s<=t} path(s).
PiecewiseLinear running_min(const JumpDriftPath& path);

/// U(y) = inf{t : L(t) > y} with L = -running_min; +inf when L never exceeds y
/// before the horizon.
double first_passage(const JumpDriftPath& path, double y);

/// U as a path on [0, L(horizon)], for paths with negative drift. Flat
/// stretches of L become jumps of U; a flat stretch still open at the horizon
/// becomes a jump at L(horizon), so U(L(horizon)) = horizon.
JumpDriftPath first_passage_path(const JumpDriftPath& path);

/// outer o inner for non-decreasing `inner`. When inner leaves the domain of
/// outer the result is cut at that time and flagged as truncated.
JumpDriftPath compose_monotone(const JumpDriftPath& outer, const JumpDriftPath& inner);

/// Pointwise sum; horizons must match exactly.
JumpDriftPath add(const JumpDriftPath& a, const JumpDriftPath& b);

struct Excursion {
  double left = 0.0;
  double right = 0.0;
  bool censored = false;  ///< still open at the horizon
  double length() const noexcept { return right - left; }
};

struct ExcursionSet {
  std::vector<Excursion> intervals;
  double horizon = 0.0;
};

/// Maximal intervals of {t : path(t) > inf_{s<=t} path(s)}. Exact for jump
/// paths; on grid paths the comparison is made at grid points and overlay
/// jump times only.
ExcursionSet extract_excursions(const JumpDriftPath& path);
ExcursionSet extract_excursions(const GridPath& path);

/// Lengths in decreasing order; equal lengths keep left-endpoint order.
std::vector<double> lengths_desc(const ExcursionSet& e);

struct ExcursionMark {
  double left;
  double length;
  double increment;  ///< phi(r) - phi(l-)
};

std::vector<ExcursionMark> excursion_marks(const ExcursionSet& e, const JumpDriftPath& phi);

struct GoodnessReport {
  std::size_t excursions = 0;
  double max_right_jump = 0.0;      ///< (i): largest |path(r) - path(r-)| at right endpoints
  double complement_measure = 0.0;  ///< (iv): time not covered by excursions
  std::vector<double> eps;          ///< (v): thresholds
  std::vector<std::size_t> count_at_least;
  double min_right_gap = kInf;       ///< (ii)/(iii) heuristics on right endpoints
  double median_right_gap = kInf;
  std::size_t right_gaps_below_tol = 0;
};

GoodnessReport goodness_report(const JumpDriftPath& path, double horizon, double tol);
GoodnessReport goodness_report(const GridPath& path, double horizon, double tol);

/// CSV `time,value,is_jump`.
void write_path_csv(std::ostream& os, const JumpDriftPath& path);
void write_path_csv(std::ostream& os, const GridPath& path);

}  // namespace rank2
