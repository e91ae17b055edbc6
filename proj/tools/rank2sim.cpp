// rank2sim: command-line front end for sampling, exploration, limit
// simulation and regime experiments.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "rank2/exploration.hpp"
#include "rank2/graphgen.hpp"
#include "rank2/harness.hpp"
#include "rank2/io.hpp"
#include "rank2/levy.hpp"

namespace fs = std::filesystem;
using namespace rank2;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  std::optional<std::size_t> replicas;
  std::optional<unsigned> threads;
  std::optional<double> grid_step;
  std::optional<double> horizon;
  bool dump_paths = false;
};

void add_common(CLI::App* app, Common& c, bool config_required = true) {
  auto* opt = app->add_option("--config", c.config, "JSON config or model spec")->check(CLI::ExistingFile);
  if (config_required) opt->required();
  app->add_option("--seed", c.seed, "RNG seed (RANK2SIM_SEED overrides the config value)");
  app->add_option("--out", c.out, "output directory")->capture_default_str();
  app->add_option("--replicas", c.replicas, "number of replicas");
  app->add_option("--threads", c.threads, "worker threads");
  app->add_option("--grid-step", c.grid_step, "grid step h for limit paths");
  app->add_option("--horizon", c.horizon, "simulation horizon");
  app->add_flag("--dump-paths", c.dump_paths, "write sample paths under <out>/paths/");
}

Json read_json(const std::string& file) {
  std::ifstream is(file);
  if (!is) throw Error(Errc::InvalidArgument, "cannot open " + file);
  try {
    return Json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidArgument, file + ": " + e.what());
  }
}

// Precedence: --seed, then RANK2SIM_SEED, then the config file.
std::uint64_t resolve_seed(const Common& c, std::uint64_t from_config) {
  if (c.seed) return *c.seed;
  if (const char* env = std::getenv("RANK2SIM_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw Error(Errc::InvalidArgument, "RANK2SIM_SEED is not an unsigned integer");
    }
  }
  return from_config;
}

ExperimentConfig load_config(const Common& c) {
  ExperimentConfig cfg = config_from_json(read_json(c.config));
  cfg.seed = resolve_seed(c, cfg.seed);
  if (c.replicas) cfg.replicas = *c.replicas;
  if (c.threads) cfg.threads = std::max(1u, *c.threads);
  if (c.grid_step) cfg.limit_h = *c.grid_step;
  if (c.horizon) cfg.limit_T = *c.horizon;
  return cfg;
}

// A file is either a bare model spec or an experiment config; the latter
// yields the model at the last ladder rung.
ModelSpec load_spec(const Common& c, std::uint64_t& seed) {
  const Json j = read_json(c.config);
  if (j.contains("w1")) {
    seed = resolve_seed(c, j.value("seed", std::uint64_t{1}));
    return spec_from_json(j);
  }
  const ExperimentConfig cfg = load_config(c);
  seed = cfg.seed;
  return build_model(cfg.model, cfg.n_ladder.back()).spec;
}

std::ofstream open_out(const fs::path& p) {
  fs::create_directories(p.parent_path());
  std::ofstream os(p);
  if (!os) throw Error(Errc::InvalidArgument, "cannot write " + p.string());
  return os;
}

int cmd_sample_graph(const Common& c) {
  std::uint64_t seed = 1;
  const ModelSpec spec = load_spec(c, seed);
  const std::size_t replicas = c.replicas.value_or(1);
  for (std::size_t i = 0; i < replicas; ++i) {
    Rng rng = make_rng(seed, i);
    const Rank2Graph g = sample_graph(spec, rng);
    const std::string suffix = replicas == 1 ? "" : "_" + std::to_string(i);
    auto edges = open_out(fs::path(c.out) / ("edges" + suffix + ".csv"));
    write_edges_csv(edges, g);
    auto comps = open_out(fs::path(c.out) / ("components" + suffix + ".csv"));
    write_components_csv(comps, components(g));
  }
  std::cout << "wrote " << replicas << " graph(s) to " << c.out << "\n";
  return 0;
}

int cmd_explore(const Common& c, bool bipartite) {
  std::uint64_t seed = 1;
  const ModelSpec spec = load_spec(c, seed);
  Rng rng = make_rng(seed, 0);
  const ExplorationBundle b =
      bipartite ? build_exploration_bp(spec, rng, std::nullopt, c.horizon) : build_exploration(spec, rng, c.horizon);
  const ExcursionSet e = extract_excursions(b.V);
  auto os = open_out(fs::path(c.out) / "excursions.csv");
  os.precision(17);
  os << "left,length,type2_increment\n";
  for (const ExcursionMark& m : excursion_marks(e, b.U2_X21)) os << m.left << ',' << m.length << ',' << m.increment << '\n';
  if (c.dump_paths) {
    const fs::path dir = fs::path(c.out) / "paths";
    auto v = open_out(dir / "V.csv");
    write_path_csv(v, b.V);
    auto x11 = open_out(dir / "X11.csv");
    write_path_csv(x11, b.X11);
    auto x22 = open_out(dir / "X22.csv");
    write_path_csv(x22, b.X22);
    auto u = open_out(dir / "U2_X21.csv");
    write_path_csv(u, b.U2_X21);
  }
  std::cout << e.intervals.size() << " excursions of V on [0, " << b.horizon << "]\n";
  return 0;
}

int cmd_limit(const Common& c) {
  const Json j = read_json(c.config);
  LimitPlan plan;
  std::uint64_t seed = 1;
  std::size_t replicas = 100, top_k = 3;
  int max_doublings = 3;
  unsigned threads = c.threads.value_or(1);
  std::optional<double> h = c.grid_step, T = c.horizon;
  if (j.contains("triple")) {
    plan.rank_one = limit_from_json(j["triple"]);
    seed = resolve_seed(c, j.value("seed", std::uint64_t{1}));
    replicas = c.replicas.value_or(j.value("replicas", replicas));
    top_k = j.value("top_k", top_k);
  } else {
    const ExperimentConfig cfg = load_config(c);
    plan = limit_plan(build_model(cfg.model, cfg.n_ladder.front()), cfg.regime);
    seed = cfg.seed;
    replicas = c.replicas.value_or(cfg.limit_replicas);
    top_k = cfg.top_k;
    max_doublings = cfg.max_doublings;
    threads = cfg.threads;
    if (!h) h = cfg.limit_h;
    if (!T) T = cfg.limit_T;
  }
  const LimitSamples s = simulate_limit(plan, replicas, top_k, h, T, max_doublings, seed, threads);
  auto os = open_out(fs::path(c.out) / "zeta.csv");
  os.precision(17);
  os << "replica,rank,length\n";
  for (std::size_t i = 0; i < s.zeta.size(); ++i)
    for (std::size_t k = 0; k < s.zeta[i].size(); ++k) os << i << ',' << k + 1 << ',' << s.zeta[i][k] << '\n';
  if (c.dump_paths) {
    // Replica 0 only; same stream as the zeta above.
    Rng rng = make_rng(seed, 0);
    const double TT = T.value_or(s.T), hh = h.value_or(s.h);
    GridPath path;
    if (!plan.regime) {
      path = simulate_W(plan.rank_one, hh, TT, rng).path;
    } else {
      switch (plan.regime->tag()) {
        case Regime::Classic: path = limit_classic(*plan.regime, hh, TT, rng).path; break;
        case Regime::Bipartite: path = limit_bipartite(*plan.regime, hh, TT, rng).path; break;
        case Regime::Interacting: path = limit_interacting(*plan.regime, hh, TT, rng).path; break;
      }
    }
    auto p = open_out(fs::path(c.out) / "paths" / "limit_0.csv");
    write_path_csv(p, path);
  }
  std::cout << "h=" << s.h << " T=" << s.T << " inadequate=" << s.inadequate << "\n";
  return 0;
}

int cmd_convert(const Common& c, const std::string& kind) {
  const Json j = read_json(c.config);
  Json out;
  try {
    if (kind == "sbm") {
      const SbmConversion conv =
          sbm_to_rank2(j.at("n1").get<std::size_t>(), j.at("n2").get<std::size_t>(), mat_from_json(j.at("k")),
                       mat_from_json(j.value("a", Json::array({{0.0, 0.0}, {0.0, 0.0}}))), vec_from_json(j.at("mu")),
                       vec_from_json(j.value("b", Json::array({0.0, 0.0}))));
      out = {{"spec", spec_to_json(conv.spec)},
             {"limits", {limit_to_json(conv.limits[0]), limit_to_json(conv.limits[1])}}};
    } else {
      const BipErConversion conv =
          bip_er_to_rank2(j.at("n").get<std::size_t>(), j.at("m").get<std::size_t>(), j.value("lambda12", 0.0),
                          clustering_from_string(j.value("clustering", std::string("light"))), j.value("theta", 0.0));
      out = {{"spec", spec_to_json(conv.spec)},
             {"limits", {limit_to_json(conv.limits[0]), limit_to_json(conv.limits[1])}}};
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("malformed conversion input: ") + e.what());
  }
  auto os = open_out(fs::path(c.out) / "spec.json");
  os << out.dump(2) << '\n';
  std::cout << out["spec"].dump() << "\n";
  return 0;
}

int cmd_experiment(const Common& c, bool slope) {
  const ExperimentConfig cfg = load_config(c);
  const auto start = std::chrono::steady_clock::now();
  if (slope) {
    const SlopeReport s = slope_diagnostic(cfg);
    const Json j{{"seed", cfg.seed}, {"predicted", s.predicted}, {"mean", s.mean}, {"sd", s.sd},
                 {"relative_error", s.relative_error}, {"slopes", s.slopes}};
    auto os = open_out(fs::path(c.out) / "slope.json");
    os << j.dump(2) << '\n';
    std::cout << "slope " << s.mean << " +- " << s.sd << " (predicted " << s.predicted << ")\n";
    return 0;
  }
  const ExperimentReport r = run_regime_experiment(cfg);
  write_report(c.out, r);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  auto t = open_out(fs::path(c.out) / "timing.json");
  t << Json{{"seed", cfg.seed}, {"threads", cfg.threads}, {"seconds", seconds}}.dump(2) << '\n';
  for (const RungReport& rr : r.rungs) {
    std::cout << "n=" << rr.n << " pass_fraction=" << rr.pass_fraction << (rr.pass ? " PASS" : " FAIL");
    if (!rr.ranks.empty()) std::cout << " ks_p(top1)=" << rr.ranks.front().ks.p_value;
    std::cout << "\n";
  }
  if (!r.error.empty()) {
    std::cerr << "error: " << r.error << "\n";
    return 1;
  }
  return 0;
}

int cmd_residuals(const Common& c, const std::string& family, double alpha, const std::vector<std::size_t>& ladder) {
  const auto rows = convergence_residuals(family, alpha, ladder);
  std::ostringstream ss;
  ss.precision(10);
  ss << "n,sigma2,l3_ratio,l3_residual,theta_residual,kernel_residual\n";
  for (const ResidualRow& r : rows)
    ss << r.n << ',' << r.sigma2 << ',' << r.l3_ratio << ',' << r.l3_residual << ',' << r.theta_residual << ','
       << r.kernel_residual << '\n';
  auto os = open_out(fs::path(c.out) / "residuals.csv");
  os << ss.str();
  std::cout << ss.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation toolkit for critical rank-2 multiplicative random graphs"};
  app.require_subcommand(1);

  Common sample_c, explore_c, limit_c, sbm_c, biper_c, exp_c, slope_c, res_c;
  auto* sample = app.add_subcommand("sample-graph", "sample graphs; writes edges.csv and components.csv");
  add_common(sample, sample_c);

  bool bp = false;
  auto* explore = app.add_subcommand("explore", "build exploration processes; writes excursions.csv");
  add_common(explore, explore_c);
  explore->add_flag("--bipartite", bp, "use the rescaled bipartite processes");

  auto* limit = app.add_subcommand("limit", "simulate limit excursion lengths; writes zeta.csv");
  add_common(limit, limit_c);

  auto* convert = app.add_subcommand("convert", "convert SBM or bipartite ER parameters to a model spec");
  convert->require_subcommand(1);
  auto* sbm = convert->add_subcommand("sbm", "two-block SBM");
  add_common(sbm, sbm_c);
  auto* biper = convert->add_subcommand("biper", "bipartite Erdos-Renyi");
  add_common(biper, biper_c);

  auto* experiment = app.add_subcommand("experiment", "run a regime experiment; writes report.json and CSVs");
  add_common(experiment, exp_c);

  auto* slope = app.add_subcommand("slope", "slope diagnostic of U2 o X21 (classic regime)");
  add_common(slope, slope_c);

  std::string family = "constant";
  double alpha = 0.4;
  std::vector<std::size_t> ladder{1000, 10000, 100000};
  auto* residuals = app.add_subcommand("residuals", "finite-n residuals of the weight conditions");
  add_common(residuals, res_c, false);
  residuals->add_option("--family", family, "constant | power")->capture_default_str();
  residuals->add_option("--alpha", alpha, "power-law exponent in (1/3, 1/2)")->capture_default_str();
  residuals->add_option("--ladder", ladder, "sizes")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sample) return cmd_sample_graph(sample_c);
    if (*explore) return cmd_explore(explore_c, bp);
    if (*limit) return cmd_limit(limit_c);
    if (*sbm) return cmd_convert(sbm_c, "sbm");
    if (*biper) return cmd_convert(biper_c, "biper");
    if (*experiment) return cmd_experiment(exp_c, false);
    if (*slope) return cmd_experiment(slope_c, true);
    if (*residuals) return cmd_residuals(res_c, family, alpha, ladder);
  } catch (const Error& e) {
    std::cerr << "rank2sim: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
