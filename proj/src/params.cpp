#include "rank2/params.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace rank2 {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::InvalidModel: return "InvalidModel";
    case Errc::PFNotCritical: return "PFNotCritical";
    case Errc::NonPositiveKernel: return "NonPositiveKernel";
    case Errc::NotInteracting: return "NotInteracting";
    case Errc::NotBipartite: return "NotBipartite";
    case Errc::NotCriticalSBM: return "NotCriticalSBM";
    case Errc::DegenerateDiagonal: return "DegenerateDiagonal";
    case Errc::OutOfDomain: return "OutOfDomain";
    case Errc::HorizonMismatch: return "HorizonMismatch";
    case Errc::ZeroDiagonal: return "ZeroDiagonal";
    case Errc::WrongRegime: return "WrongRegime";
    case Errc::AllZero: return "AllZero";
    case Errc::EmptySample: return "EmptySample";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// WeightVector

WeightVector::WeightVector(std::vector<double> entries) {
  for (double x : entries) {
    if (!std::isfinite(x) || x < 0.0) throw Error(Errc::InvalidArgument, "weights must be finite and >= 0");
  }
  std::erase_if(entries, [](double x) { return x == 0.0; });
  std::sort(entries.begin(), entries.end(), std::greater<>());
  entries_ = std::move(entries);
  for (int p = 1; p <= 3; ++p) {
    CompensatedSum acc;
    for (double x : entries_) acc.add(std::pow(x, p));
    sigma_[p - 1] = acc.value();
  }
}

WeightVector WeightVector::constant(double value, std::size_t count) {
  if (count > 0 && !(value > 0.0 && std::isfinite(value)))
    throw Error(Errc::InvalidArgument, "constant weight must be positive");
  WeightVector w;
  w.entries_.assign(count, value);
  const auto n = static_cast<double>(count);
  // Exact closed forms avoid accumulating n rounding errors.
  w.sigma_ = {n * value, n * value * value, n * value * value * value};
  return w;
}

WeightVector WeightVector::scaled(double factor) const {
  if (!(factor > 0.0)) throw Error(Errc::InvalidArgument, "scale factor must be positive");
  if (is_constant() && !empty()) return constant(entries_.front() * factor, size());
  std::vector<double> out(entries_.begin(), entries_.end());
  for (double& x : out) x *= factor;
  return WeightVector(std::move(out));
}

double sigma_p(const WeightVector& w, int p) {
  if (p < 1) throw Error(Errc::InvalidArgument, "sigma_p requires p >= 1");
  if (p <= 3) return p == 1 ? w.sigma1() : (p == 2 ? w.sigma2() : w.sigma3());
  CompensatedSum acc;
  for (double x : w.entries()) acc.add(std::pow(x, p));
  return acc.value();
}

std::vector<double> merge_sorted(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out;
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out), std::greater<>());
  return out;
}

void LimitTriple::validate() const {
  if (!(beta >= 0.0)) throw Error(Errc::InvalidArgument, "beta must be >= 0");
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (!(theta[i] >= 0.0)) throw Error(Errc::InvalidArgument, "theta entries must be >= 0");
    if (i > 0 && theta[i] > theta[i - 1]) throw Error(Errc::InvalidArgument, "theta must be non-increasing");
  }
  if (!(theta_tail_l3 >= 0.0)) throw Error(Errc::InvalidArgument, "theta tail bound must be >= 0");
}

// ---------------------------------------------------------------------------
// KernelDecomposition / ModelSpec

namespace {

bool finite(const Mat2& m) {
  for (const auto& row : m)
    for (double x : row)
      if (!std::isfinite(x)) return false;
  return true;
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

bool near(const Mat2& a, const Mat2& b, double tol) {
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      if (!near(a[i][j], b[i][j], tol)) return false;
  return true;
}

constexpr Mat2 kIdentity{{{1.0, 0.0}, {0.0, 1.0}}};
constexpr Mat2 kAntiDiagonal{{{0.0, 1.0}, {1.0, 0.0}}};

}  // namespace

void KernelDecomposition::validate() const {
  if (!finite(K) || !finite(Lambda)) throw Error(Errc::InvalidModel, "K and Lambda must be finite");
  if (!is_symmetric(K, 1e-12)) throw Error(Errc::InvalidModel, "K must be symmetric");
  if (!is_symmetric(Lambda, 1e-12)) throw Error(Errc::InvalidModel, "Lambda must be symmetric");
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      if (K[i][j] < 0.0) throw Error(Errc::InvalidModel, "K entries must be >= 0");
      if (K[i][j] == 0.0 && Lambda[i][j] < 0.0)
        throw Error(Errc::InvalidModel, "Lambda_ij must be >= 0 where K_ij = 0");
    }
  if (!(c_n > 0.0)) throw Error(Errc::InvalidModel, "c_n must be positive");
}

double ModelSpec::c_n() const {
  const double s = w1.sigma2() * w2.sigma2();
  return s > 0.0 ? 1.0 / std::sqrt(s) : kInf;
}

Mat2 ModelSpec::residual() const {
  if (!decomposition) return Mat2{};
  const double d1 = w1.sigma2() > 0.0 ? 1.0 / std::sqrt(w1.sigma2()) : 0.0;
  const double d2 = w2.sigma2() > 0.0 ? 1.0 / std::sqrt(w2.sigma2()) : 0.0;
  const Mat2 scale = diag(d1, d2);
  return Q - matmul(matmul(scale, decomposition->K), scale) - decomposition->Lambda;
}

double ModelSpec::effective_residual_tolerance() const {
  if (residual_tolerance >= 0.0) return residual_tolerance;
  const double cn = decomposition ? decomposition->c_n : c_n();
  return 1e-6 * (std::isfinite(cn) ? cn : 1.0);
}

bool ModelSpec::residual_warning() const {
  return decomposition && max_abs(residual()) > effective_residual_tolerance();
}

void ModelSpec::validate() const {
  if (!finite(Q)) throw Error(Errc::InvalidModel, "Q must be finite");
  if (!is_symmetric(Q, 1e-12)) throw Error(Errc::InvalidModel, "Q must be symmetric");
  for (const auto& row : Q)
    for (double x : row)
      if (x < 0.0) throw Error(Errc::InvalidModel, "Q entries must be >= 0");
  if (decomposition) {
    decomposition->validate();
    const double cn = c_n();
    if (std::isfinite(cn) && std::abs(cn - decomposition->c_n) > 1e-9 * cn)
      throw Error(Errc::InvalidModel, "c_n does not match 1/sqrt(sigma2(w1) sigma2(w2))");
  }
}

ModelSpec make_spec(WeightVector w1, WeightVector w2, const Mat2& K, const Mat2& Lambda, double alpha) {
  ModelSpec spec;
  spec.w1 = std::move(w1);
  spec.w2 = std::move(w2);
  if (spec.w1.empty() || spec.w2.empty()) throw Error(Errc::InvalidModel, "decomposed specs need both types");
  KernelDecomposition dec{K, Lambda, alpha, spec.c_n()};
  dec.validate();
  const Mat2 scale = diag(1.0 / std::sqrt(spec.w1.sigma2()), 1.0 / std::sqrt(spec.w2.sigma2()));
  spec.Q = matmul(matmul(scale, K), scale) + Lambda;
  spec.Q[1][0] = spec.Q[0][1];
  spec.decomposition = dec;
  spec.validate();
  return spec;
}

// ---------------------------------------------------------------------------
// Regimes

const char* to_string(Regime r) noexcept {
  switch (r) {
    case Regime::Classic: return "classic";
    case Regime::Interacting: return "interacting";
    case Regime::Bipartite: return "bipartite";
  }
  return "unknown";
}

Regime regime_from_string(const std::string& s) {
  if (s == "classic" || s == "C") return Regime::Classic;
  if (s == "interacting" || s == "I") return Regime::Interacting;
  if (s == "bipartite" || s == "BP") return Regime::Bipartite;
  throw Error(Errc::InvalidArgument, "unknown regime '" + s + "'");
}

const ClassicParams& RegimeParams::classic() const {
  if (const auto* p = std::get_if<ClassicParams>(&value)) return *p;
  throw Error(Errc::WrongRegime, "expected classic regime parameters");
}

const InteractingParams& RegimeParams::interacting() const {
  if (const auto* p = std::get_if<InteractingParams>(&value)) return *p;
  throw Error(Errc::WrongRegime, "expected interacting regime parameters");
}

const BipartiteParams& RegimeParams::bipartite() const {
  if (const auto* p = std::get_if<BipartiteParams>(&value)) return *p;
  throw Error(Errc::WrongRegime, "expected bipartite regime parameters");
}

PerronFrobenius perron_frobenius(const Mat2& m) {
  const double a = m[0][0], b = m[0][1], c = m[1][0], d = m[1][1];
  const double half_tr = 0.5 * (a + d);
  const double half_diff = 0.5 * (a - d);
  const double disc = half_diff * half_diff + b * c;
  if (disc < 0.0) throw Error(Errc::InvalidArgument, "matrix has complex eigenvalues");
  const double root = half_tr + std::sqrt(disc);
  Vec2 v;
  if (b != 0.0) {
    // (rho - a) = sqrt(disc) - half_diff; written this way to avoid cancellation when a >> d.
    const double second = std::sqrt(disc) - half_diff;
    v = {b, second};
  } else if (c != 0.0) {
    v = {std::sqrt(disc) + half_diff, c};
  } else {
    v = a >= d ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
  }
  const double s = v[0] + v[1];
  if (!(s != 0.0)) throw Error(Errc::InvalidArgument, "degenerate PF eigenvector");
  return {root, {v[0] / s, v[1] / s}};
}

namespace {

LimitTriple scaled_limit(const LimitTriple& l, double u) {
  LimitTriple out;
  out.beta = u * u * u * l.beta;
  out.theta = l.theta;
  for (double& x : out.theta) x *= u;
  out.theta_tail_l3 = u * u * u * l.theta_tail_l3;
  out.asserted_regular = l.asserted_regular;
  return out;
}

LimitTriple combine(const LimitTriple& a, const LimitTriple& b, double lambda) {
  LimitTriple out;
  out.beta = a.beta + b.beta;
  out.theta = merge_sorted(a.theta, b.theta);
  out.lambda = lambda;
  out.theta_tail_l3 = a.theta_tail_l3 + b.theta_tail_l3;
  out.asserted_regular = a.asserted_regular || b.asserted_regular;
  return out;
}

}  // namespace

RegimeParams classic_params(const KernelDecomposition& dec, const std::array<LimitTriple, 2>& limits, double tol) {
  dec.validate();
  for (const auto& row : dec.K)
    for (double x : row)
      if (!(x > 0.0)) throw Error(Errc::NonPositiveKernel, "classic regime needs all kappa_ij > 0");
  for (const auto& l : limits) l.validate();
  const PerronFrobenius pf = perron_frobenius(dec.K);
  if (std::abs(pf.eigenvalue - 1.0) > tol)
    throw Error(Errc::PFNotCritical, "PF eigenvalue of K is " + std::to_string(pf.eigenvalue));
  const Vec2 u = pf.vector;
  ClassicParams p;
  p.u = u;
  p.limit = combine(scaled_limit(limits[0], u[0]), scaled_limit(limits[1], u[1]), dot(u, matvec(dec.Lambda, u)));
  return RegimeParams{p};
}

RegimeParams interacting_params(const KernelDecomposition& dec, const std::array<LimitTriple, 2>& limits,
                                double tol) {
  if (!near(dec.K, kIdentity, tol)) throw Error(Errc::NotInteracting, "interacting regime needs K = I");
  const double l12 = dec.Lambda[0][1];
  if (!(l12 > 0.0)) throw Error(Errc::NotInteracting, "interacting regime needs lambda12 > 0");
  dec.validate();
  for (const auto& l : limits) l.validate();
  InteractingParams p;
  for (int i = 0; i < 2; ++i) {
    p.z[i] = limits[i];
    p.z[i].lambda = dec.Lambda[i][i];
  }
  p.lambda12 = l12;
  return RegimeParams{p};
}

RegimeParams bipartite_params(const KernelDecomposition& dec, const std::array<LimitTriple, 2>& limits, double tol) {
  if (!near(dec.K, kAntiDiagonal, tol)) throw Error(Errc::NotBipartite, "bipartite regime needs K = [[0,1],[1,0]]");
  if (dec.Lambda[0][0] < 0.0 || dec.Lambda[1][1] < 0.0)
    throw Error(Errc::NotBipartite, "bipartite regime needs lambda_ii >= 0");
  dec.validate();
  for (const auto& l : limits) l.validate();
  const Mat2& L = dec.Lambda;
  BipartiteParams p;
  p.limit = combine(limits[0], limits[1], L[0][0] + 2.0 * L[0][1] + L[1][1]);
  return RegimeParams{p};
}

RegimeParams regime_params(Regime r, const KernelDecomposition& dec, const std::array<LimitTriple, 2>& limits,
                           double tol) {
  switch (r) {
    case Regime::Classic: return classic_params(dec, limits, tol);
    case Regime::Interacting: return interacting_params(dec, limits, tol);
    case Regime::Bipartite: return bipartite_params(dec, limits, tol);
  }
  throw Error(Errc::InvalidArgument, "unknown regime");
}

// ---------------------------------------------------------------------------
// Conversions

SbmConversion sbm_to_rank2(std::size_t n1, std::size_t n2, const Mat2& k_tilde, const Mat2& a_tilde,
                           const Vec2& mu, const Vec2& b, double tol) {
  if (n1 == 0 || n2 == 0) throw Error(Errc::InvalidArgument, "both blocks must be non-empty");
  if (!(mu[0] > 0.0 && mu[1] > 0.0) || std::abs(mu[0] + mu[1] - 1.0) > 1e-12)
    throw Error(Errc::InvalidArgument, "mu must be positive and sum to 1");
  if (!is_symmetric(k_tilde, 1e-12) || !is_symmetric(a_tilde, 1e-12))
    throw Error(Errc::InvalidArgument, "k and a must be symmetric");
  const Mat2 m_tilde{{{k_tilde[0][0] * mu[0], k_tilde[0][1] * mu[1]}, {k_tilde[1][0] * mu[0], k_tilde[1][1] * mu[1]}}};
  const PerronFrobenius pf = perron_frobenius(m_tilde);
  if (std::abs(pf.eigenvalue - 1.0) > tol)
    throw Error(Errc::NotCriticalSBM, "PF root of k diag(mu) is " + std::to_string(pf.eigenvalue));

  const double n = static_cast<double>(n1 + n2);
  const double n_23 = std::pow(n, -2.0 / 3.0);
  const double n_13 = std::cbrt(n);

  Mat2 K{}, Lambda{}, Q{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double sij = std::sqrt(mu[i] * mu[j]);
      K[i][j] = sij * k_tilde[i][j];
      // Symmetric form of D^{1/2} A D^{1/2} + (D^{-1/2} B K D^{1/2} + D^{1/2} K B D^{-1/2}) / 2.
      Lambda[i][j] = sij * a_tilde[i][j] +
                     0.5 * k_tilde[i][j] * (b[i] * std::sqrt(mu[j] / mu[i]) + b[j] * std::sqrt(mu[i] / mu[j]));
      Q[i][j] = sij * (k_tilde[i][j] * n_13 + a_tilde[i][j]);
    }
  for (const auto& row : Q)
    for (double x : row)
      if (x < 0.0) throw Error(Errc::InvalidModel, "SBM conversion produced negative q_ij (n too small)");

  SbmConversion out;
  out.spec.w1 = WeightVector::constant(n_23 / std::sqrt(mu[0]), n1);
  out.spec.w2 = WeightVector::constant(n_23 / std::sqrt(mu[1]), n2);
  out.spec.Q = Q;
  out.spec.decomposition = KernelDecomposition{K, Lambda, b[0] / mu[0] - b[1] / mu[1], out.spec.c_n()};
  out.spec.validate();
  for (int i = 0; i < 2; ++i) out.limits[i].beta = 1.0 / std::sqrt(mu[i]);
  return out;
}

BipErConversion bip_er_to_rank2(std::size_t n, std::size_t m, double lambda12, ClusteringRegime regime,
                                double theta) {
  if (n == 0 || m == 0) throw Error(Errc::InvalidArgument, "n and m must be >= 1");
  if (regime == ClusteringRegime::Moderate && !(theta > 0.0))
    throw Error(Errc::InvalidArgument, "moderate regime needs theta > 0");
  const double dn = static_cast<double>(n), dm = static_cast<double>(m);
  // In the heavy regime the small side is the right one; swap the roles.
  const bool heavy = regime == ClusteringRegime::Heavy;
  const double big = heavy ? dm : dn;      // side with weights big^{-2/3}
  const double other = heavy ? dn : dm;    // side with weights big^{-1/6} other^{-1/2}
  const double w_big = std::pow(big, -2.0 / 3.0);
  const double w_other = std::pow(big, -1.0 / 6.0) / std::sqrt(other);
  const double q12 = std::cbrt(big) + lambda12;
  if (q12 < 0.0) throw Error(Errc::InvalidModel, "q12 must be >= 0");

  BipErConversion out;
  out.spec.w1 = WeightVector::constant(heavy ? w_other : w_big, n);
  out.spec.w2 = WeightVector::constant(heavy ? w_big : w_other, m);
  out.spec.Q = {{{0.0, q12}, {q12, 0.0}}};
  const double cn = out.spec.c_n();
  out.spec.decomposition = KernelDecomposition{kAntiDiagonal, {{{0.0, lambda12}, {lambda12, 0.0}}}, 0.0, cn};
  out.spec.validate();

  switch (regime) {
    case ClusteringRegime::Light:
      out.limits[0].beta = 1.0;
      out.limits[1].beta = 0.0;
      break;
    case ClusteringRegime::Moderate:
      out.limits[0].beta = 1.0;
      out.limits[1].beta = 1.0 / std::sqrt(theta);
      break;
    case ClusteringRegime::Heavy:
      out.limits[0].beta = 0.0;
      out.limits[1].beta = 1.0;
      break;
  }
  return out;
}

double default_bipartite_delta(const ModelSpec& spec) {
  const double cn = spec.decomposition ? spec.decomposition->c_n : spec.c_n();
  return 1.0 / (cn * cn);
}

BipartiteReparam bipartite_reparam(const ModelSpec& spec, std::optional<double> delta) {
  if (spec.decomposition && !near(spec.decomposition->K, kAntiDiagonal, kCriticalityTolerance))
    throw Error(Errc::NotBipartite, "bipartite reparametrization needs K = [[0,1],[1,0]]");
  BipartiteReparam out;
  out.original_Q = spec.Q;
  out.q = spec.Q[0][1];
  if (!(out.q > 0.0)) throw Error(Errc::NotBipartite, "q12 must be positive");
  for (int i = 0; i < 2; ++i) {
    if (out.original_Q[i][i] == 0.0) {
      if (!delta) throw Error(Errc::DegenerateDiagonal, "q_ii = 0 and no diagonal perturbation supplied");
      if (!(*delta > 0.0)) throw Error(Errc::InvalidArgument, "delta must be positive");
      out.original_Q[i][i] = *delta;
      out.delta = *delta;
    }
    out.eps[i] = out.original_Q[i][i] / out.q;
  }
  out.w1 = spec.w1.empty() ? WeightVector{} : spec.w1.scaled(out.eps[0]);
  out.w2 = spec.w2.empty() ? WeightVector{} : spec.w2.scaled(out.eps[1]);
  out.Q[0][0] = out.q / out.eps[0];
  out.Q[1][1] = out.q / out.eps[1];
  out.Q[0][1] = out.Q[1][0] = out.q / (out.eps[0] * out.eps[1]);
  return out;
}

LimitTriple weight_limit_proxy(const WeightVector& w, std::size_t atoms) {
  LimitTriple out;
  if (w.empty()) return out;
  const double s2 = w.sigma2();
  double cubes = 0.0;
  for (std::size_t j = 0; j < std::min(atoms, w.size()); ++j) {
    const double th = w[j] / s2;
    out.theta.push_back(th);
    cubes += th * th * th;
  }
  out.beta = std::max(0.0, w.sigma3() / (s2 * s2 * s2) - cubes);
  return out;
}

}  // namespace rank2
