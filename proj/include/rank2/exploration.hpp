#pragma once

// Finite-n exploration processes and first hitting times of additive fields.

#include <optional>
#include <vector>

#include "rank2/cadlag.hpp"
#include "rank2/params.hpp"
#include "rank2/random.hpp"

namespace rank2 {

/// Encoding processes of one sample. For the bipartite variant the X paths
/// are the rescaled ones and `eps` holds the scale factors (zero otherwise).
struct ExplorationBundle {
  JumpDriftPath N1, N2;
  JumpDriftPath X11, X12, X21, X22;
  JumpDriftPath U2;       ///< first passage of X22
  JumpDriftPath U2_X21;   ///< U2 o X21, the type-2 time consumed
  JumpDriftPath V;        ///< X11 + X12 o U2 o X21
  std::vector<double> clock1, clock2;  ///< jump time of vertex l in N^i (+inf if past the horizon)
  double horizon = 0.0;
  Vec2 eps{};
};

/// max_i (2 sigma1(w^i) q_ii + 10 / q_ii) over types with weight.
double default_exploration_horizon(const ModelSpec& spec);

/// Clocks xi ~ Exp(w), N^i jumps w at xi / q_ii. Needs q11 > 0, and q22 > 0
/// when w2 is non-empty.
ExplorationBundle build_exploration(const ModelSpec& spec, Rng& rng, std::optional<double> horizon = std::nullopt);

/// Rescaled processes sharing one clock rate q:
/// X~21(t) = sum w1 1[xi1 <= q t], X~11 = -t + eps1 X~21, and symmetrically.
ExplorationBundle build_exploration_tilde(const WeightVector& w1, const WeightVector& w2, Vec2 eps, double q,
                                          Rng& rng, double horizon);

/// Reparametrizes `spec` (perturbing zero diagonals by `delta`, default
/// c_n^-2) and builds the rescaled processes.
ExplorationBundle build_exploration_bp(const ModelSpec& spec, Rng& rng, std::optional<double> delta = std::nullopt,
                                       std::optional<double> horizon = std::nullopt);

/// f11, f22 never jump down; f12, f21 are non-decreasing. All start at 0.
struct AdditiveField {
  JumpDriftPath f11, f12, f21, f22;

  const JumpDriftPath& get(int j, int i) const;
  void validate() const;
};

/// First t >= `after` with f(t-) = level, given f(s-) > level on [after, t).
/// Level 0 is hit at time 0. +inf when the horizon comes first.
double first_left_hit(const JumpDriftPath& f, double level, double after = 0.0);

/// tau(v) = inf{t : f(t-) = -v}.
inline double tau(const JumpDriftPath& f, double v) { return first_left_hit(f, -v); }

struct FieldHittingResult {
  Vec2 T{};
  std::vector<Vec2> iterates;  ///< u^(0) = 0, u^(1), ...
  bool converged = true;
};

/// Minimal solution of r_j + f^{jj}(T_j-) + f^{ji}(T_i-) = 0 by the monotone
/// iteration u_j <- tau^j(r_j + f^{ji}(u_i -)). Exact when f12, f21 are pure
/// jump; otherwise stops at relative change `tol` or `max_iter`.
FieldHittingResult field_hitting_time(const AdditiveField& F, Vec2 r, std::size_t max_iter = 100000,
                                      double tol = 0.0);

/// (T1, T2) for r = (r, 0) via T1 = inf{t : f11(t-) + f12 o tau2 o f21(t-) = -r}.
/// Needs f21 pure jump.
Vec2 single_process_T1(const AdditiveField& F, double r);

/// The field (X11, X12, X21, X22) of a bundle, restricted to a common horizon.
AdditiveField field_of(const ExplorationBundle& b);

}  // namespace rank2
