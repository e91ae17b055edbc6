#pragma once

// Experiment orchestration: model families over an n-ladder, graph and limit
// replicas, two-sample comparisons, slope and residual diagnostics.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rank2/io.hpp"
#include "rank2/levy.hpp"
#include "rank2/params.hpp"
#include "rank2/stats.hpp"

namespace rank2 {

/// Where the finite-n models of an experiment come from.
///
/// kernel:   w1 = n^{-2/3} 1_n, w2 = n^{-1/6} n2^{-1/2} 1_{n2} with n2 = round(type2_ratio n),
///           Q = n^{1/3} K + Lambda; limits beta = (1, type2_ratio^{-1/2}). type2_ratio = 0 gives a
///           one-type model.
/// sbm:      two-block SBM with n vertices split by mu.
/// biper:    bipartite Erdos-Renyi with m = round(m_ratio n).
/// explicit: a fixed spec and limits; the ladder is ignored.
struct ModelSource {
  std::string kind = "kernel";
  Mat2 K{{{0.5, 0.5}, {0.5, 0.5}}};
  Mat2 Lambda{};
  double type2_ratio = 1.0;
  Mat2 k_tilde{{{1.0, 1.0}, {1.0, 1.0}}};
  Mat2 a_tilde{};
  Vec2 mu{0.5, 0.5};
  Vec2 b{};
  ClusteringRegime clustering = ClusteringRegime::Light;
  double lambda12 = 0.0;
  double m_ratio = 1.0;
  std::optional<ModelSpec> spec;
  std::array<LimitTriple, 2> limits;
};

struct RungModel {
  std::size_t n = 0;
  ModelSpec spec;
  std::array<LimitTriple, 2> limits;
};

RungModel build_model(const ModelSource& src, std::size_t n);

struct ExperimentConfig {
  ModelSource model;
  Regime regime = Regime::Classic;
  std::vector<std::size_t> n_ladder{1000};
  std::size_t replicas = 100;
  std::optional<double> limit_h;
  std::optional<double> limit_T;
  std::size_t limit_replicas = 1000;
  int max_doublings = 3;
  std::size_t top_k = 3;
  double significance = 0.01;
  double pass_fraction = 0.8;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

ExperimentConfig config_from_json(const Json& j);
/// Every field written out, defaults included.
Json config_to_json(const ExperimentConfig& cfg);

/// Runs fn(i) for i in [0, count) on `threads` workers.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

/// Limit object of a model: the regime parameters plus how coordinate 1 and
/// the mass ratio scale with zeta. One-type models use zeta of (beta1, theta1, lambda11).
struct LimitPlan {
  std::optional<RegimeParams> regime;
  LimitTriple rank_one;
  double coefficient = 1.0;              ///< M_{l,1} ~ coefficient * zeta_l
  std::optional<double> predicted_ratio; ///< M_{l,2} / M_{l,1}
};

LimitPlan limit_plan(const RungModel& model, Regime regime);

struct LimitSamples {
  std::vector<std::vector<double>> zeta;  ///< per replica, top-k lengths (zero padded)
  double h = 0.0;
  double T = 0.0;
  int max_doublings_used = 0;
  std::size_t inadequate = 0;
};

/// `limit_replicas` zeta vectors with per-replica seeds derive_seed(seed, i).
LimitSamples simulate_limit(const LimitPlan& plan, std::size_t replicas, std::size_t top_k, std::optional<double> h,
                            std::optional<double> T, int max_doublings, std::uint64_t seed, unsigned threads);

/// Top-k ORD1 masses of `replicas` sampled graphs, seeds derive_seed(seed, i).
std::vector<std::vector<Vec2>> sample_top_masses(const ModelSpec& spec, std::size_t replicas, std::size_t top_k,
                                                 std::uint64_t seed, unsigned threads);

struct RankComparison {
  std::size_t rank = 0;
  KsResult ks;
  double w1 = 0.0;
  double graph_mean = 0.0;
  double limit_mean = 0.0;
  bool pass = false;
};

struct RungReport {
  std::size_t n = 0;
  std::vector<RankComparison> ranks;
  std::optional<double> predicted_ratio;
  double ratio_mean = 0.0;  ///< ratio of mean masses of the largest component
  double ratio_relative_error = 0.0;
  double correlation = 0.0;  ///< of (M_{1,1}, M_{1,2}) across replicas
  bool residual_warning = false;
  double pass_fraction = 0.0;
  bool pass = false;
  std::vector<std::vector<Vec2>> masses;
};

struct ExperimentReport {
  ExperimentConfig config;
  LimitSamples limit;
  double coefficient = 1.0;
  std::vector<RungReport> rungs;
  std::string error;
};

/// Compares rescaled top-k type-1 masses with coefficient * zeta per rank.
std::vector<RankComparison> compare_ranks(const std::vector<std::vector<Vec2>>& masses, const LimitSamples& limit,
                                          double coefficient, double significance);

ExperimentReport run_regime_experiment(const ExperimentConfig& cfg);

Json report_to_json(const ExperimentReport& r);

/// report.json, masses.csv, zeta.csv and config.resolved.json in `dir`.
void write_report(const std::filesystem::path& dir, const ExperimentReport& r);

struct SlopeReport {
  double predicted = 0.0;
  double mean = 0.0;
  double sd = 0.0;
  double relative_error = 0.0;
  std::vector<double> slopes;
};

/// kappa11 kappa12 / (kappa22 (1 - kappa22)).
double predicted_slope(const Mat2& K);

/// Least-squares slope through the origin of U2 o X21 on `points` equally
/// spaced times in (0, t_max], per replica, at the last rung of the ladder.
SlopeReport slope_diagnostic(const ExperimentConfig& cfg, double t_max = 1.0, std::size_t points = 100);

struct ResidualRow {
  std::size_t n = 0;
  double sigma2 = 0.0;
  double l3_ratio = 0.0;        ///< sigma3 / sigma2^3
  double l3_residual = 0.0;     ///< |l3_ratio - limit|
  double theta_residual = 0.0;  ///< max_{j<=5} |w_j / sigma2 - theta_j|
  double kernel_residual = 0.0; ///< |q sigma2 - 1| for the leading-order q
};

/// family "constant": w = n^{-2/3} 1_n. family "power": w_l = n^{2 alpha - 1} l^{-alpha},
/// alpha in (1/3, 1/2), with theta_j = (1 - 2 alpha) j^{-alpha}.
std::vector<ResidualRow> convergence_residuals(const std::string& family, double alpha,
                                               const std::vector<std::size_t>& ladder);

}  // namespace rank2
