#include <atomic>
#include <cmath>

#include "doctest.h"
#include "rank2/harness.hpp"

using namespace rank2;

namespace {

ExperimentConfig tiny() {
  ExperimentConfig c;
  c.model.K = {{{0.5, 0.5}, {0.5, 0.5}}};
  c.n_ladder = {200, 400};
  c.replicas = 20;
  c.limit_replicas = 20;
  c.limit_h = 0.01;
  c.top_k = 2;
  c.seed = 7;
  return c;
}

}  // namespace

TEST_CASE("config round trip") {
  ExperimentConfig c = tiny();
  c.regime = Regime::Interacting;
  c.model.kind = "biper";
  c.model.clustering = ClusteringRegime::Moderate;
  c.model.lambda12 = 0.5;
  c.model.m_ratio = 3;
  const Json j = config_to_json(c);
  CHECK(config_to_json(config_from_json(j)) == j);
  CHECK(j["limit"]["T"].is_null());
  CHECK(j["limit"]["h"] == 0.01);

  const ExperimentConfig d = config_from_json(Json::object());
  CHECK(d.n_ladder == std::vector<std::size_t>{1000});
  CHECK(d.top_k == 3);
  CHECK_THROWS_AS(config_from_json(Json{{"replicas", "many"}}), Error);
  CHECK_THROWS_AS(config_from_json(Json{{"n_ladder", Json::array()}}), Error);
  CHECK_THROWS_AS(config_from_json(Json{{"regime", "nonsense"}}), Error);
}

TEST_CASE("parallel_for visits every index once") {
  std::vector<std::atomic<int>> seen(101);
  parallel_for(101, 4, [&](std::size_t i) { ++seen[i]; });
  for (auto& s : seen) CHECK(s.load() == 1);
  CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) {
                    if (i == 5) throw Error(Errc::InvalidArgument, "boom");
                  }),
                  Error);
}

TEST_CASE("model families") {
  ModelSource src;
  src.K = {{{0.5, 0.5}, {0.5, 0.5}}};
  src.type2_ratio = 0.25;
  const RungModel m = build_model(src, 1000);
  CHECK(m.spec.w1.size() == 1000);
  CHECK(m.spec.w2.size() == 250);
  CHECK(m.spec.w1.sigma2() == doctest::Approx(std::pow(1000.0, -1.0 / 3)));
  CHECK(m.spec.w2.sigma2() == doctest::Approx(std::pow(1000.0, -1.0 / 3)));
  CHECK(m.spec.Q[0][0] == doctest::Approx(5.0));
  CHECK(m.limits[1].beta == doctest::Approx(2.0));

  src.type2_ratio = 0;
  src.K[0][0] = 1;
  src.Lambda[0][0] = 0.3;
  const RungModel one = build_model(src, 1000);
  CHECK(one.spec.w2.empty());
  CHECK(one.spec.Q[0][0] == doctest::Approx(10.3));
  const LimitPlan plan = limit_plan(one, Regime::Classic);
  CHECK(!plan.regime);
  CHECK(plan.rank_one.lambda == doctest::Approx(0.3));

  src.kind = "sbm";
  src.k_tilde = {{{1.5, 0.5}, {0.5, 1.5}}};
  src.mu = {0.5, 0.5};
  const RungModel sbm = build_model(src, 500);
  CHECK(sbm.spec.w1.size() + sbm.spec.w2.size() == 500);

  src.kind = "nope";
  CHECK_THROWS_AS(build_model(src, 10), Error);
}

TEST_CASE("classic plan coefficient") {
  const RungModel m = build_model(ModelSource{}, 1000);
  const LimitPlan plan = limit_plan(m, Regime::Classic);
  REQUIRE(plan.regime);
  CHECK(plan.coefficient == doctest::Approx(0.5));
  CHECK(*plan.predicted_ratio == doctest::Approx(1.0));
}

TEST_CASE("experiments are reproducible across thread counts") {
  ExperimentConfig c = tiny();
  const ExperimentReport a = run_regime_experiment(c);
  c.threads = 3;
  const ExperimentReport b = run_regime_experiment(c);
  CHECK(a.error.empty());
  REQUIRE(a.rungs.size() == 2);
  CHECK(a.rungs[0].ranks.size() == 2);
  CHECK(report_to_json(a) == report_to_json(b));
  CHECK(a.limit.zeta == b.limit.zeta);
  for (const auto& z : a.limit.zeta) CHECK(z[0] >= z[1]);
}

TEST_CASE("a failing rung keeps earlier results") {
  ExperimentConfig c = tiny();
  c.model.kind = "sbm";
  c.model.k_tilde = {{{1.5, 0.5}, {0.5, 1.5}}};
  c.model.mu = {0.5, 0.5};
  c.n_ladder = {200, 1};
  const ExperimentReport r = run_regime_experiment(c);
  CHECK(r.rungs.size() == 1);
  CHECK(!r.error.empty());
  CHECK(report_to_json(r).contains("error"));
}

TEST_CASE("slope prediction") {
  CHECK(predicted_slope({{{0.5, 0.25}, {0.25, 0.5}}}) == doctest::Approx(0.5));
  CHECK_THROWS_AS(predicted_slope({{{0.5, 0.25}, {0.25, 1.0}}}), Error);
  ExperimentConfig c = tiny();
  c.regime = Regime::Bipartite;
  try {
    slope_diagnostic(c);
    FAIL("expected WrongRegime");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::WrongRegime);
  }
}

TEST_CASE("weight residuals") {
  const auto rows = convergence_residuals("constant", 0, {100, 1000});
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(r.l3_residual == doctest::Approx(0).epsilon(1e-9).scale(1));
    CHECK(r.kernel_residual < 1e-9);
  }

  const double a = 0.4;
  const auto p = convergence_residuals("power", a, {1000, 10000, 100000});
  // Direct sums for the first rung.
  double s2 = 0, s3 = 0;
  for (int l = 1; l <= 1000; ++l) {
    const double w = std::pow(1000.0, 2 * a - 1) * std::pow(l, -a);
    s2 += w * w;
    s3 += w * w * w;
  }
  CHECK(p[0].sigma2 == doctest::Approx(s2).epsilon(1e-10));
  CHECK(p[0].l3_ratio == doctest::Approx(s3 / (s2 * s2 * s2)).epsilon(1e-10));
  for (std::size_t k = 1; k < p.size(); ++k) {
    CHECK(p[k].l3_residual < p[k - 1].l3_residual);
    CHECK(p[k].theta_residual < p[k - 1].theta_residual);
    CHECK(p[k].kernel_residual < p[k - 1].kernel_residual);
  }
  CHECK_THROWS_AS(convergence_residuals("power", 0.6, {10, 20}), Error);
  CHECK_THROWS_AS(convergence_residuals("constant", 0, {10}), Error);
  CHECK_THROWS_AS(convergence_residuals("other", 0, {10, 20}), Error);
}
