#include "rank2/io.hpp"

namespace rank2 {

Json mat_to_json(const Mat2& m) { return Json::array({{m[0][0], m[0][1]}, {m[1][0], m[1][1]}}); }

Mat2 mat_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_array() || j[0].size() != 2 || !j[1].is_array() || j[1].size() != 2)
    throw Error(Errc::InvalidArgument, "expected a 2x2 matrix");
  return {{{j[0][0].get<double>(), j[0][1].get<double>()}, {j[1][0].get<double>(), j[1][1].get<double>()}}};
}

Vec2 vec_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw Error(Errc::InvalidArgument, "expected a 2-vector");
  return {j[0].get<double>(), j[1].get<double>()};
}

Json weights_to_json(const WeightVector& w) {
  if (!w.empty() && w.is_constant()) return {{"value", w[0]}, {"count", w.size()}};
  return Json(std::vector<double>(w.entries().begin(), w.entries().end()));
}

WeightVector weights_from_json(const Json& j) {
  if (j.is_object()) return WeightVector::constant(j.at("value").get<double>(), j.at("count").get<std::size_t>());
  if (j.is_array()) return WeightVector(j.get<std::vector<double>>());
  throw Error(Errc::InvalidArgument, "weights must be an array or {value, count}");
}

Json spec_to_json(const ModelSpec& spec) {
  Json j{{"w1", weights_to_json(spec.w1)}, {"w2", weights_to_json(spec.w2)}, {"Q", mat_to_json(spec.Q)}};
  if (spec.decomposition) {
    const auto& d = *spec.decomposition;
    j["decomposition"] = {{"K", mat_to_json(d.K)}, {"Lambda", mat_to_json(d.Lambda)}, {"alpha", d.alpha}, {"c_n", d.c_n}};
  }
  if (spec.residual_tolerance >= 0.0) j["residual_tolerance"] = spec.residual_tolerance;
  return j;
}

ModelSpec spec_from_json(const Json& j) {
  try {
    WeightVector w1 = weights_from_json(j.at("w1"));
    WeightVector w2 = j.contains("w2") ? weights_from_json(j.at("w2")) : WeightVector{};
    ModelSpec spec;
    if (j.contains("decomposition") && !j.contains("Q")) {
      const Json& d = j.at("decomposition");
      spec = make_spec(std::move(w1), std::move(w2), mat_from_json(d.at("K")), mat_from_json(d.at("Lambda")),
                       d.value("alpha", 0.0));
    } else {
      spec.w1 = std::move(w1);
      spec.w2 = std::move(w2);
      spec.Q = mat_from_json(j.at("Q"));
      if (j.contains("decomposition")) {
        const Json& d = j.at("decomposition");
        spec.decomposition = KernelDecomposition{mat_from_json(d.at("K")), mat_from_json(d.at("Lambda")),
                                                 d.value("alpha", 0.0), d.value("c_n", spec.c_n())};
      }
    }
    if (j.contains("residual_tolerance")) spec.residual_tolerance = j.at("residual_tolerance").get<double>();
    spec.validate();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("malformed model spec: ") + e.what());
  }
}

Json limit_to_json(const LimitTriple& t) {
  return {{"beta", t.beta},
          {"theta", t.theta},
          {"lambda", t.lambda},
          {"theta_tail_l3", t.theta_tail_l3},
          {"asserted_regular", t.asserted_regular}};
}

LimitTriple limit_from_json(const Json& j) {
  LimitTriple t;
  t.beta = j.value("beta", 0.0);
  t.theta = j.value("theta", std::vector<double>{});
  t.lambda = j.value("lambda", 0.0);
  t.theta_tail_l3 = j.value("theta_tail_l3", 0.0);
  t.asserted_regular = j.value("asserted_regular", false);
  t.validate();
  return t;
}

ClusteringRegime clustering_from_string(const std::string& s) {
  if (s == "light") return ClusteringRegime::Light;
  if (s == "moderate") return ClusteringRegime::Moderate;
  if (s == "heavy") return ClusteringRegime::Heavy;
  throw Error(Errc::InvalidArgument, "unknown clustering regime '" + s + "'");
}

const char* to_string(ClusteringRegime r) noexcept {
  switch (r) {
    case ClusteringRegime::Light: return "light";
    case ClusteringRegime::Moderate: return "moderate";
    case ClusteringRegime::Heavy: return "heavy";
  }
  return "unknown";
}

}  // namespace rank2
