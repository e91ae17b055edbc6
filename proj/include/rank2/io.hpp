#pragma once

// JSON encoding of weights, specs and limit triples.

#include "json.hpp"
#include "rank2/params.hpp"

namespace rank2 {

using Json = nlohmann::json;

Json mat_to_json(const Mat2& m);
Mat2 mat_from_json(const Json& j);
Vec2 vec_from_json(const Json& j);

/// Constant non-empty vectors are written as {"value": v, "count": n}.
Json weights_to_json(const WeightVector& w);
WeightVector weights_from_json(const Json& j);

/// {"w1": .., "w2": .., "Q": .., "decomposition": {"K", "Lambda", "alpha", "c_n"}}.
/// Q may be omitted when a decomposition is given; it is then assembled.
Json spec_to_json(const ModelSpec& spec);
ModelSpec spec_from_json(const Json& j);

Json limit_to_json(const LimitTriple& t);
LimitTriple limit_from_json(const Json& j);

ClusteringRegime clustering_from_string(const std::string& s);
const char* to_string(ClusteringRegime r) noexcept;

}  // namespace rank2
