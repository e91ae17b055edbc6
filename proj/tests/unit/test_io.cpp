#include "doctest.h"
#include "rank2/io.hpp"

using namespace rank2;

TEST_CASE("weights encode constants compactly") {
  const WeightVector c = WeightVector::constant(0.25, 4);
  const Json j = weights_to_json(c);
  CHECK(j == Json{{"value", 0.25}, {"count", 4}});
  CHECK(weights_from_json(j).size() == 4);
  const WeightVector v({0.5, 0.25});
  CHECK(weights_to_json(v) == Json::array({0.5, 0.25}));
  CHECK(weights_to_json(WeightVector{}) == Json::array());
  CHECK_THROWS_AS(weights_from_json(Json("x")), Error);
}

TEST_CASE("spec round trip") {
  const ModelSpec s = make_spec(WeightVector({0.6, 0.3, 0.1}), WeightVector::constant(0.2, 5),
                                {{{0.5, 0.25}, {0.25, 0.75}}}, {{{0.1, -0.05}, {-0.05, 0.2}}}, 0.5);
  const ModelSpec r = spec_from_json(Json::parse(spec_to_json(s).dump()));
  CHECK(r.Q == s.Q);
  CHECK(std::equal(r.w1.entries().begin(), r.w1.entries().end(), s.w1.entries().begin(), s.w1.entries().end()));
  CHECK(r.w2.size() == 5);
  REQUIRE(r.decomposition);
  CHECK(r.decomposition->K == s.decomposition->K);
  CHECK(r.decomposition->Lambda == s.decomposition->Lambda);
  CHECK(r.decomposition->alpha == 0.5);
  CHECK(r.decomposition->c_n == s.decomposition->c_n);

  // Q may be left for the loader to assemble.
  Json partial = spec_to_json(s);
  partial.erase("Q");
  CHECK(spec_from_json(partial).Q == s.Q);
}

TEST_CASE("malformed specs") {
  CHECK_THROWS_AS(spec_from_json(Json{{"w2", {1.0}}}), Error);
  CHECK_THROWS_AS(mat_from_json(Json::array({1, 2, 3})), Error);
  CHECK_THROWS_AS(vec_from_json(Json::array({1})), Error);
  try {
    spec_from_json(Json{{"w1", {0.5}}, {"Q", {{1, 2}, {3, 1}}}});
    FAIL("expected InvalidModel");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidModel);
  }
}

TEST_CASE("limit triples and clustering names") {
  LimitTriple t;
  t.beta = 0.5;
  t.theta = {0.3, 0.1};
  t.lambda = -1;
  t.theta_tail_l3 = 1e-4;
  const LimitTriple r = limit_from_json(limit_to_json(t));
  CHECK(r.beta == t.beta);
  CHECK(r.theta == t.theta);
  CHECK(r.lambda == t.lambda);
  CHECK(r.theta_tail_l3 == t.theta_tail_l3);
  for (auto c : {ClusteringRegime::Light, ClusteringRegime::Moderate, ClusteringRegime::Heavy})
    CHECK(clustering_from_string(to_string(c)) == c);
  CHECK_THROWS_AS(clustering_from_string("medium"), Error);
}
