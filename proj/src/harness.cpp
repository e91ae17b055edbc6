#include "rank2/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include <boost/math/special_functions/zeta.hpp>

#include "rank2/exploration.hpp"
#include "rank2/graphgen.hpp"
#include "rank2/random.hpp"

namespace rank2 {

namespace {

std::size_t rounded(double x) { return static_cast<std::size_t>(std::llround(x)); }

}  // namespace

RungModel build_model(const ModelSource& src, std::size_t n) {
  RungModel out;
  out.n = n;
  if (src.kind == "explicit") {
    if (!src.spec) throw Error(Errc::InvalidArgument, "explicit model source needs a spec");
    out.spec = *src.spec;
    out.limits = src.limits;
    return out;
  }
  if (n == 0) throw Error(Errc::InvalidArgument, "ladder sizes must be >= 1");
  const double dn = static_cast<double>(n);
  if (src.kind == "kernel") {
    const std::size_t n2 = rounded(src.type2_ratio * dn);
    WeightVector w1 = WeightVector::constant(std::pow(dn, -2.0 / 3.0), n);
    out.limits[0].beta = 1.0;
    if (n2 == 0) {
      out.spec.w1 = std::move(w1);
      out.spec.Q[0][0] = std::cbrt(dn) * src.K[0][0] + src.Lambda[0][0];
      out.spec.validate();
      return out;
    }
    WeightVector w2 = WeightVector::constant(std::pow(dn, -1.0 / 6.0) / std::sqrt(static_cast<double>(n2)), n2);
    out.spec = make_spec(std::move(w1), std::move(w2), src.K, src.Lambda);
    out.limits[1].beta = 1.0 / std::sqrt(src.type2_ratio);
    return out;
  }
  if (src.kind == "sbm") {
    const std::size_t n1 = rounded(src.mu[0] * dn);
    if (n1 == 0 || n1 >= n) throw Error(Errc::InvalidArgument, "sbm rung too small for both blocks");
    SbmConversion c = sbm_to_rank2(n1, n - n1, src.k_tilde, src.a_tilde, src.mu, src.b);
    out.spec = std::move(c.spec);
    out.limits = c.limits;
    return out;
  }
  if (src.kind == "biper") {
    const std::size_t m = std::max<std::size_t>(1, rounded(src.m_ratio * dn));
    BipErConversion c = bip_er_to_rank2(n, m, src.lambda12, src.clustering, src.m_ratio);
    out.spec = std::move(c.spec);
    out.limits = c.limits;
    return out;
  }
  throw Error(Errc::InvalidArgument, "unknown model source '" + src.kind + "'");
}

// ---------------------------------------------------------------------------
// Config JSON

namespace {

Json source_to_json(const ModelSource& s) {
  Json j{{"source", s.kind}};
  if (s.kind == "kernel") {
    j["K"] = mat_to_json(s.K);
    j["Lambda"] = mat_to_json(s.Lambda);
    j["type2_ratio"] = s.type2_ratio;
  } else if (s.kind == "sbm") {
    j["k"] = mat_to_json(s.k_tilde);
    j["a"] = mat_to_json(s.a_tilde);
    j["mu"] = {s.mu[0], s.mu[1]};
    j["b"] = {s.b[0], s.b[1]};
  } else if (s.kind == "biper") {
    j["clustering"] = to_string(s.clustering);
    j["lambda12"] = s.lambda12;
    j["m_ratio"] = s.m_ratio;
  } else if (s.kind == "explicit") {
    if (s.spec) j["spec"] = spec_to_json(*s.spec);
    j["limits"] = {limit_to_json(s.limits[0]), limit_to_json(s.limits[1])};
  }
  return j;
}

ModelSource source_from_json(const Json& j) {
  ModelSource s;
  s.kind = j.value("source", std::string("kernel"));
  if (j.contains("K")) s.K = mat_from_json(j["K"]);
  if (j.contains("Lambda")) s.Lambda = mat_from_json(j["Lambda"]);
  s.type2_ratio = j.value("type2_ratio", 1.0);
  if (j.contains("k")) s.k_tilde = mat_from_json(j["k"]);
  if (j.contains("a")) s.a_tilde = mat_from_json(j["a"]);
  if (j.contains("mu")) s.mu = vec_from_json(j["mu"]);
  if (j.contains("b")) s.b = vec_from_json(j["b"]);
  if (j.contains("clustering")) s.clustering = clustering_from_string(j["clustering"].get<std::string>());
  s.lambda12 = j.value("lambda12", 0.0);
  s.m_ratio = j.value("m_ratio", 1.0);
  if (j.contains("spec")) s.spec = spec_from_json(j["spec"]);
  if (j.contains("limits")) {
    const Json& l = j["limits"];
    if (!l.is_array() || l.size() != 2) throw Error(Errc::InvalidArgument, "limits must list two triples");
    s.limits = {limit_from_json(l[0]), limit_from_json(l[1])};
  }
  if (s.kind == "explicit" && !s.spec) throw Error(Errc::InvalidArgument, "explicit source needs 'spec'");
  return s;
}

Json optional_json(const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); }

std::optional<double> optional_from(const Json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<double>();
}

}  // namespace

ExperimentConfig config_from_json(const Json& j) {
  try {
    ExperimentConfig c;
    if (j.contains("model")) c.model = source_from_json(j["model"]);
    if (j.contains("regime")) c.regime = regime_from_string(j["regime"].get<std::string>());
    if (j.contains("n_ladder")) c.n_ladder = j["n_ladder"].get<std::vector<std::size_t>>();
    c.replicas = j.value("replicas", c.replicas);
    if (j.contains("limit")) {
      const Json& l = j["limit"];
      c.limit_h = optional_from(l, "h");
      c.limit_T = optional_from(l, "T");
      c.limit_replicas = l.value("replicas", c.limit_replicas);
      c.max_doublings = l.value("max_doublings", c.max_doublings);
    }
    if (j.contains("statistics")) {
      const Json& s = j["statistics"];
      c.top_k = s.value("top_k", c.top_k);
      c.significance = s.value("significance", c.significance);
      c.pass_fraction = s.value("pass_fraction", c.pass_fraction);
    }
    c.seed = j.value("seed", c.seed);
    c.threads = j.value("threads", c.threads);
    if (c.replicas < 1 || c.limit_replicas < 1) throw Error(Errc::InvalidArgument, "replicas must be >= 1");
    if (c.top_k < 1) throw Error(Errc::InvalidArgument, "top_k must be >= 1");
    if (c.n_ladder.empty()) throw Error(Errc::InvalidArgument, "n_ladder must not be empty");
    if (c.threads < 1) c.threads = 1;
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("malformed experiment config: ") + e.what());
  }
}

Json config_to_json(const ExperimentConfig& c) {
  return {{"model", source_to_json(c.model)},
          {"regime", to_string(c.regime)},
          {"n_ladder", c.n_ladder},
          {"replicas", c.replicas},
          {"limit",
           {{"h", optional_json(c.limit_h)},
            {"T", optional_json(c.limit_T)},
            {"replicas", c.limit_replicas},
            {"max_doublings", c.max_doublings}}},
          {"statistics", {{"top_k", c.top_k}, {"significance", c.significance}, {"pass_fraction", c.pass_fraction}}},
          {"seed", c.seed},
          {"threads", c.threads}};
}

// ---------------------------------------------------------------------------
// Replicas

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

LimitPlan limit_plan(const RungModel& model, Regime regime) {
  LimitPlan plan;
  if (model.spec.w2.empty()) {
    plan.rank_one = model.limits[0];
    plan.rank_one.lambda = model.spec.decomposition ? model.spec.decomposition->Lambda[0][0]
                                                     : model.spec.Q[0][0] - 1.0 / model.spec.w1.sigma2();
    return plan;
  }
  if (!model.spec.decomposition) throw Error(Errc::InvalidModel, "regime experiments need a kernel decomposition");
  plan.regime = regime_params(regime, *model.spec.decomposition, model.limits);
  switch (regime) {
    case Regime::Classic: {
      const Vec2 u = plan.regime->classic().u;
      plan.coefficient = u[0];
      plan.predicted_ratio = u[1] / u[0];
      break;
    }
    case Regime::Bipartite:
      plan.predicted_ratio = 1.0;
      break;
    case Regime::Interacting:
      break;
  }
  return plan;
}

LimitSamples simulate_limit(const LimitPlan& plan, std::size_t replicas, std::size_t top_k, std::optional<double> h,
                            std::optional<double> T, int max_doublings, std::uint64_t seed, unsigned threads) {
  LimitSamples out;
  out.T = T ? *T : default_levy_horizon(plan.regime ? regime_scale_triple(*plan.regime) : plan.rank_one);
  out.h = h ? *h : 1e-4 * out.T;
  LevySettings settings{out.h, out.T, max_doublings};
  std::vector<ZetaResult> results(replicas);
  parallel_for(replicas, threads, [&](std::size_t i) {
    Rng rng = make_rng(seed, i);
    results[i] = plan.regime ? regime_zeta(*plan.regime, settings, rng) : zeta(plan.rank_one, settings, rng);
  });
  out.zeta.resize(replicas);
  for (std::size_t i = 0; i < replicas; ++i) {
    std::vector<double>& z = out.zeta[i];
    z.assign(top_k, 0.0);
    for (std::size_t k = 0; k < std::min(top_k, results[i].lengths.size()); ++k) z[k] = results[i].lengths[k];
    out.max_doublings_used = std::max(out.max_doublings_used, results[i].doublings);
    if (!results[i].adequate) ++out.inadequate;
  }
  return out;
}

std::vector<std::vector<Vec2>> sample_top_masses(const ModelSpec& spec, std::size_t replicas, std::size_t top_k,
                                                 std::uint64_t seed, unsigned threads) {
  std::vector<std::vector<Vec2>> out(replicas);
  parallel_for(replicas, threads, [&](std::size_t i) {
    Rng rng = make_rng(seed, i);
    const ComponentMassList list = sample_component_masses(spec, rng, top_k);
    out[i].assign(top_k, Vec2{0.0, 0.0});
    for (std::size_t k = 0; k < std::min(top_k, list.size()); ++k) out[i][k] = list.masses[k];
  });
  return out;
}

std::vector<RankComparison> compare_ranks(const std::vector<std::vector<Vec2>>& masses, const LimitSamples& limit,
                                          double coefficient, double significance) {
  std::vector<RankComparison> out;
  if (masses.empty() || limit.zeta.empty()) return out;
  const std::size_t k = std::min(masses.front().size(), limit.zeta.front().size());
  for (std::size_t r = 0; r < k; ++r) {
    std::vector<double> a, b;
    for (const auto& m : masses) a.push_back(m[r][0]);
    for (const auto& z : limit.zeta) b.push_back(coefficient * z[r]);
    RankComparison c;
    c.rank = r + 1;
    c.ks = ks_two_sample(a, b);
    c.w1 = wasserstein1(a, b);
    c.graph_mean = mean(a);
    c.limit_mean = mean(b);
    c.pass = c.ks.p_value > significance;
    out.push_back(c);
  }
  return out;
}

namespace {

std::uint64_t stream(std::uint64_t seed, std::uint64_t label) { return derive_seed(seed, label); }

}  // namespace

ExperimentReport run_regime_experiment(const ExperimentConfig& cfg) {
  ExperimentReport report;
  report.config = cfg;
  const std::vector<std::size_t> ladder =
      cfg.model.kind == "explicit" ? std::vector<std::size_t>{0} : cfg.n_ladder;
  const LimitPlan plan = limit_plan(build_model(cfg.model, ladder.front()), cfg.regime);
  report.coefficient = plan.coefficient;
  report.limit = simulate_limit(plan, cfg.limit_replicas, cfg.top_k, cfg.limit_h, cfg.limit_T, cfg.max_doublings,
                                stream(cfg.seed, 0), cfg.threads);
  for (std::size_t rung = 0; rung < ladder.size(); ++rung) {
    try {
      const RungModel model = build_model(cfg.model, ladder[rung]);
      RungReport rr;
      rr.n = ladder[rung];
      rr.residual_warning = model.spec.residual_warning();
      rr.masses = sample_top_masses(model.spec, cfg.replicas, cfg.top_k, stream(cfg.seed, rung + 1), cfg.threads);
      rr.ranks = compare_ranks(rr.masses, report.limit, plan.coefficient, cfg.significance);
      std::vector<double> m1, m2;
      for (const auto& m : rr.masses) {
        m1.push_back(m[0][0]);
        m2.push_back(m[0][1]);
      }
      rr.predicted_ratio = plan.predicted_ratio;
      rr.ratio_mean = mean(m2) / mean(m1);
      if (plan.predicted_ratio)
        rr.ratio_relative_error = std::abs(rr.ratio_mean - *plan.predicted_ratio) / *plan.predicted_ratio;
      rr.correlation = m1.size() >= 2 ? pearson(m1, m2) : 0.0;
      std::size_t passed = 0;
      for (const auto& c : rr.ranks) passed += c.pass ? 1 : 0;
      rr.pass_fraction = rr.ranks.empty() ? 0.0 : static_cast<double>(passed) / static_cast<double>(rr.ranks.size());
      rr.pass = rr.pass_fraction >= cfg.pass_fraction;
      report.rungs.push_back(std::move(rr));
    } catch (const std::exception& e) {
      report.error = "rung " + std::to_string(ladder[rung]) + ": " + e.what();
      break;
    }
  }
  return report;
}

namespace {

Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace

Json report_to_json(const ExperimentReport& r) {
  Json rungs = Json::array();
  for (const RungReport& rr : r.rungs) {
    Json ranks = Json::array();
    for (const RankComparison& c : rr.ranks)
      ranks.push_back({{"rank", c.rank},
                       {"ks_statistic", c.ks.statistic},
                       {"ks_p_value", c.ks.p_value},
                       {"wasserstein1", c.w1},
                       {"graph_mean", c.graph_mean},
                       {"limit_mean", c.limit_mean},
                       {"pass", c.pass}});
    Json ratio{{"observed", number_or_null(rr.ratio_mean)}};
    if (rr.predicted_ratio) {
      ratio["predicted"] = *rr.predicted_ratio;
      ratio["relative_error"] = number_or_null(rr.ratio_relative_error);
    }
    rungs.push_back({{"n", rr.n},
                     {"replicas", rr.masses.size()},
                     {"ranks", ranks},
                     {"largest_component_ratio", ratio},
                     {"largest_component_correlation", number_or_null(rr.correlation)},
                     {"residual_warning", rr.residual_warning},
                     {"pass_fraction", rr.pass_fraction},
                     {"pass", rr.pass}});
  }
  Json zeta_mean = Json::array();
  if (!r.limit.zeta.empty()) {
    for (std::size_t k = 0; k < r.limit.zeta.front().size(); ++k) {
      std::vector<double> col;
      for (const auto& z : r.limit.zeta) col.push_back(z[k]);
      zeta_mean.push_back(mean(col));
    }
  }
  Json j{{"seed", r.config.seed},
         {"regime", to_string(r.config.regime)},
         {"note", "top-k order statistics are compared as a proxy for l2 convergence of the full sequence"},
         {"limit",
          {{"replicas", r.limit.zeta.size()},
           {"h", r.limit.h},
           {"T", r.limit.T},
           {"max_doublings_used", r.limit.max_doublings_used},
           {"inadequate_horizons", r.limit.inadequate},
           {"coefficient", r.coefficient},
           {"zeta_mean", zeta_mean}}},
         {"rungs", rungs}};
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

void write_report(const std::filesystem::path& dir, const ExperimentReport& r) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream os(dir / "report.json");
    os << report_to_json(r).dump(2) << '\n';
  }
  {
    std::ofstream os(dir / "config.resolved.json");
    os << config_to_json(r.config).dump(2) << '\n';
  }
  {
    std::ofstream os(dir / "masses.csv");
    os.precision(17);
    os << "rung,replica,rank,mass1,mass2\n";
    for (std::size_t g = 0; g < r.rungs.size(); ++g)
      for (std::size_t i = 0; i < r.rungs[g].masses.size(); ++i)
        for (std::size_t k = 0; k < r.rungs[g].masses[i].size(); ++k)
          os << r.rungs[g].n << ',' << i << ',' << k + 1 << ',' << r.rungs[g].masses[i][k][0] << ','
             << r.rungs[g].masses[i][k][1] << '\n';
  }
  {
    std::ofstream os(dir / "zeta.csv");
    os.precision(17);
    os << "replica,rank,length\n";
    for (std::size_t i = 0; i < r.limit.zeta.size(); ++i)
      for (std::size_t k = 0; k < r.limit.zeta[i].size(); ++k) os << i << ',' << k + 1 << ',' << r.limit.zeta[i][k] << '\n';
  }
}

// ---------------------------------------------------------------------------
// Diagnostics

double predicted_slope(const Mat2& K) {
  const double k22 = K[1][1];
  if (!(k22 > 0.0 && k22 < 1.0)) throw Error(Errc::InvalidArgument, "slope needs 0 < kappa22 < 1");
  return K[0][0] * K[0][1] / (k22 * (1.0 - k22));
}

SlopeReport slope_diagnostic(const ExperimentConfig& cfg, double t_max, std::size_t points) {
  if (cfg.regime != Regime::Classic) throw Error(Errc::WrongRegime, "slope diagnostic needs the classic regime");
  const RungModel model = build_model(cfg.model, cfg.n_ladder.back());
  if (!model.spec.decomposition) throw Error(Errc::InvalidModel, "slope diagnostic needs a kernel decomposition");
  classic_params(*model.spec.decomposition, model.limits);
  SlopeReport out;
  out.predicted = predicted_slope(model.spec.decomposition->K);
  out.slopes.resize(cfg.replicas);
  const std::uint64_t seed = derive_seed(cfg.seed, 0x510e);
  parallel_for(cfg.replicas, cfg.threads, [&](std::size_t i) {
    Rng rng = make_rng(seed, i);
    const ExplorationBundle b = build_exploration(model.spec, rng);
    std::vector<double> t(points), y(points);
    for (std::size_t j = 0; j < points; ++j) {
      t[j] = t_max * static_cast<double>(j + 1) / static_cast<double>(points);
      y[j] = b.U2_X21.eval(std::min(t[j], b.U2_X21.horizon()));
    }
    out.slopes[i] = slope_through_origin(t, y);
  });
  out.mean = mean(out.slopes);
  out.sd = std::sqrt(variance(out.slopes));
  out.relative_error = std::abs(out.mean - out.predicted) / out.predicted;
  return out;
}

std::vector<ResidualRow> convergence_residuals(const std::string& family, double alpha,
                                               const std::vector<std::size_t>& ladder) {
  if (ladder.size() < 2) throw Error(Errc::InvalidArgument, "residuals need at least two rungs");
  const bool power = family == "power";
  if (!power && family != "constant") throw Error(Errc::InvalidArgument, "unknown weight family '" + family + "'");
  if (power && !(alpha > 1.0 / 3.0 && alpha < 0.5)) throw Error(Errc::InvalidArgument, "alpha must lie in (1/3, 1/2)");
  const double l3_limit = power ? std::pow(1.0 - 2.0 * alpha, 3) * boost::math::zeta(3.0 * alpha) : 1.0;
  std::vector<ResidualRow> rows;
  for (std::size_t n : ladder) {
    const double dn = static_cast<double>(n);
    WeightVector w;
    double q = 0.0;
    if (power) {
      std::vector<double> e(n);
      for (std::size_t l = 0; l < n; ++l) e[l] = std::pow(dn, 2.0 * alpha - 1.0) * std::pow(static_cast<double>(l + 1), -alpha);
      w = WeightVector(std::move(e));
      q = (1.0 - 2.0 * alpha) * std::pow(dn, 1.0 - 2.0 * alpha);
    } else {
      w = WeightVector::constant(std::pow(dn, -2.0 / 3.0), n);
      q = std::cbrt(dn);
    }
    ResidualRow row;
    row.n = n;
    row.sigma2 = w.sigma2();
    row.l3_ratio = w.sigma3() / std::pow(row.sigma2, 3);
    row.l3_residual = std::abs(row.l3_ratio - l3_limit);
    for (std::size_t j = 0; j < std::min<std::size_t>(5, n); ++j) {
      const double theta = power ? (1.0 - 2.0 * alpha) * std::pow(static_cast<double>(j + 1), -alpha) : 0.0;
      row.theta_residual = std::max(row.theta_residual, std::abs(w[j] / row.sigma2 - theta));
    }
    row.kernel_residual = std::abs(q * row.sigma2 - 1.0);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace rank2
