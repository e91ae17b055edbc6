#pragma once

// Weight vectors, kernel decompositions, regime parameter maps and the
// conversions from two-block SBMs and bipartite Erdos-Renyi graphs.

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rank2/core.hpp"

namespace rank2 {

/// Finite non-increasing sequence of positive weights with cached moments.
///
/// Zero entries are dropped at construction; negative or non-finite entries
/// are rejected.
class WeightVector {
 public:
  WeightVector() = default;
  explicit WeightVector(std::vector<double> entries);

  /// n copies of `value` (value > 0, or n == 0).
  static WeightVector constant(double value, std::size_t count);

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  double operator[](std::size_t i) const { return entries_[i]; }
  std::span<const double> entries() const noexcept { return entries_; }

  /// True when every entry is equal (enables uniform endpoint sampling).
  bool is_constant() const noexcept {
    return entries_.empty() || entries_.front() == entries_.back();
  }

  double sigma1() const noexcept { return sigma_[0]; }
  double sigma2() const noexcept { return sigma_[1]; }
  double sigma3() const noexcept { return sigma_[2]; }

  WeightVector scaled(double factor) const;

 private:
  std::vector<double> entries_;
  std::array<double, 3> sigma_{0.0, 0.0, 0.0};
};

/// sigma_p(w) = sum of w_j^p. p >= 1.
double sigma_p(const WeightVector& w, int p);

/// Non-increasing rearrangement of the multiset union of two non-increasing
/// sequences.
std::vector<double> merge_sorted(std::span<const double> a, std::span<const double> b);

/// (beta, theta, lambda) parameters of a thinned Levy process.
///
/// theta is stored finite; `theta_tail_l3` is a caller-declared bound on the
/// cube-sum of the entries that were not stored. Membership in the class where
/// excursions are well behaved (beta > 0 or theta not square summable) cannot
/// be decided from a finite theta, so the caller asserts it.
struct LimitTriple {
  double beta = 0.0;
  std::vector<double> theta;
  double lambda = 0.0;
  double theta_tail_l3 = 0.0;
  bool asserted_regular = false;

  bool regular() const noexcept { return beta > 0.0 || asserted_regular; }
  void validate() const;
};

/// K, Lambda, alpha, c_n of Q = D^{-1/2} K D^{-1/2} + Lambda + o(1).
struct KernelDecomposition {
  Mat2 K{};
  Mat2 Lambda{};
  double alpha = 0.0;
  double c_n = 1.0;

  void validate() const;
  /// det(K) == 0 within 1e-12; allowed, but R = diag(Q)^{-1} Q may then be singular.
  bool rank_one() const noexcept { return std::abs(det(K)) <= 1e-12 * std::max(1.0, max_abs(K)); }
};

/// Weights of both types plus the connection matrix Q.
struct ModelSpec {
  WeightVector w1;
  WeightVector w2;
  Mat2 Q{};
  std::optional<KernelDecomposition> decomposition;
  /// Tolerance on max |Q - D^{-1/2} K D^{-1/2} - Lambda|; negative means 1e-6 * c_n.
  double residual_tolerance = -1.0;

  const WeightVector& weights(int type) const { return type == 0 ? w1 : w2; }

  /// 1 / sqrt(sigma2(w1) sigma2(w2)); +inf when a type has no weight.
  double c_n() const;
  /// Q - D^{-1/2} K D^{-1/2} - Lambda (zero matrix without a decomposition).
  Mat2 residual() const;
  double effective_residual_tolerance() const;
  /// True when the residual exceeds its tolerance. A warning, never an error.
  bool residual_warning() const;

  /// Throws InvalidModel when Q is not symmetric non-negative or the
  /// decomposition is malformed.
  void validate() const;
};

/// Build a spec from weights and a decomposition with Q assembled exactly as
/// D^{-1/2} K D^{-1/2} + Lambda; c_n is computed from the weights.
ModelSpec make_spec(WeightVector w1, WeightVector w2, const Mat2& K, const Mat2& Lambda,
                    double alpha = 0.0);

enum class Regime { Classic, Interacting, Bipartite };

const char* to_string(Regime r) noexcept;
Regime regime_from_string(const std::string& s);

struct ClassicParams {
  Vec2 u{};  ///< right PF eigenvector of K, u1 + u2 = 1
  LimitTriple limit;
};

struct InteractingParams {
  std::array<LimitTriple, 2> z;  ///< (beta_i, theta_i, lambda_ii)
  double lambda12 = 0.0;
};

struct BipartiteParams {
  LimitTriple limit;  ///< beta1+beta2, theta1 merged theta2, lambda11+2lambda12+lambda22
};

struct RegimeParams {
  std::variant<ClassicParams, InteractingParams, BipartiteParams> value;

  Regime tag() const noexcept { return static_cast<Regime>(value.index()); }
  const ClassicParams& classic() const;
  const InteractingParams& interacting() const;
  const BipartiteParams& bipartite() const;
};

struct PerronFrobenius {
  double eigenvalue = 0.0;
  Vec2 vector{};  ///< normalized to sum 1
};

/// Closed-form PF root and right eigenvector of a 2x2 matrix with positive
/// off-diagonal entries (or diagonal matrices, where the larger entry wins).
PerronFrobenius perron_frobenius(const Mat2& m);

inline constexpr double kCriticalityTolerance = 1e-9;

RegimeParams classic_params(const KernelDecomposition& dec, const std::array<LimitTriple, 2>& limits,
                            double tol = kCriticalityTolerance);
RegimeParams interacting_params(const KernelDecomposition& dec, const std::array<LimitTriple, 2>& limits,
                                double tol = kCriticalityTolerance);
RegimeParams bipartite_params(const KernelDecomposition& dec, const std::array<LimitTriple, 2>& limits,
                              double tol = kCriticalityTolerance);

/// Dispatch on the regime tag.
RegimeParams regime_params(Regime r, const KernelDecomposition& dec, const std::array<LimitTriple, 2>& limits,
                           double tol = kCriticalityTolerance);

struct SbmConversion {
  ModelSpec spec;
  std::array<LimitTriple, 2> limits;  ///< w^i -> (mu_i^{-1/2}, 0)
};

/// Two-block SBM with n_i vertices of type i and p_ij = k_ij/n + a_ij n^{-4/3}.
SbmConversion sbm_to_rank2(std::size_t n1, std::size_t n2, const Mat2& k_tilde, const Mat2& a_tilde,
                           const Vec2& mu, const Vec2& b, double tol = kCriticalityTolerance);

enum class ClusteringRegime { Light, Moderate, Heavy };

struct BipErConversion {
  ModelSpec spec;
  std::array<LimitTriple, 2> limits;
};

/// Bipartite Erdos-Renyi B(n, m, p) in one of the three clustering regimes.
/// `theta` is the asymptotic ratio m/n and is required (> 0) for Moderate.
BipErConversion bip_er_to_rank2(std::size_t n, std::size_t m, double lambda12, ClusteringRegime regime,
                                double theta = 0.0);

struct BipartiteReparam {
  WeightVector w1;  ///< eps_1 w^1
  WeightVector w2;  ///< eps_2 w^2
  Mat2 Q{};         ///< rescaled kernel, eps_i eps_j Q~_ij = Q_ij
  Vec2 eps{};
  double q = 0.0;     ///< shared clock rate c_n + lambda12^(n) (= q12)
  Mat2 original_Q{};  ///< Q after the diagonal perturbation
  double delta = 0.0; ///< diagonal perturbation that was applied (0 if none)
};

/// c_n^{-2}; the default diagonal perturbation for purely bipartite specs.
double default_bipartite_delta(const ModelSpec& spec);

/// Rescale a nearly bipartite spec so both diagonal entries are usable as
/// clock rates. Zero diagonal entries are replaced by `delta` when given;
/// otherwise DegenerateDiagonal is thrown.
BipartiteReparam bipartite_reparam(const ModelSpec& spec, std::optional<double> delta = std::nullopt);

/// Finite-n proxy for the limit of a weight vector: beta = sigma3/sigma2^3
/// minus the cube-sum of the first `atoms` normalized weights, which become theta.
LimitTriple weight_limit_proxy(const WeightVector& w, std::size_t atoms = 0);

}  // namespace rank2
