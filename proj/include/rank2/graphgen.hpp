#pragma once

// Sampling of the rank-2 multiplicative graph and its component masses.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "rank2/params.hpp"
#include "rank2/random.hpp"

namespace rank2 {

/// Vose alias table for drawing indices proportionally to non-negative weights.
class AliasTable {
 public:
  AliasTable() = default;
  explicit AliasTable(std::span<const double> weights);

  std::size_t size() const noexcept { return prob_.size(); }
  std::size_t sample(Rng& rng) const;

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

/// Edge between vertex `a` of type `type_a` and vertex `b` of type `type_b`
/// (types 0/1, indices 0-based within the type).
struct Edge {
  std::uint8_t type_a = 0;
  std::uint8_t type_b = 0;
  std::uint32_t a = 0;
  std::uint32_t b = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Simple graph on len(w1) + len(w2) vertices. Holds a pointer to its spec,
/// which must outlive it.
struct Rank2Graph {
  const ModelSpec* spec = nullptr;
  std::vector<Edge> edges;  ///< sorted, no loops, no duplicates
};

/// Vertices are numbered flat: type-1 vertex l is l, type-2 vertex r is len(w1) + r.
struct ComponentMassList {
  std::vector<Vec2> masses;
  std::vector<std::array<std::size_t, 2>> counts;
  std::vector<std::uint64_t> min_vertex;
  std::vector<std::uint32_t> membership;  ///< flat vertex -> component id (may be empty)

  std::size_t size() const noexcept { return masses.size(); }
};

/// Each unordered pair is an edge independently with probability
/// 1 - exp(-q_ij w_l^i w_r^j), via Poisson multigraphs per block.
Rank2Graph sample_graph(const ModelSpec& spec, Rng& rng);

/// Connected components ordered by (M1 desc, M2 desc, smallest vertex asc).
ComponentMassList components(const Rank2Graph& g);

/// Same law (and, for the same generator state, the same result) as
/// components(sample_graph(...)) without materializing the edge list. With
/// top_k > 0 only the first top_k components are returned and no membership
/// map is built.
ComponentMassList sample_component_masses(const ModelSpec& spec, Rng& rng, std::size_t top_k = 0);

enum class MassCoordinate { First, Second, Total };

/// Stable reorder by the chosen coordinate (desc), ties by the other
/// coordinate (desc; M1 for Total), then by current position.
ComponentMassList ord_by(const ComponentMassList& list, MassCoordinate coordinate);

/// CSV `type_a,index_a,type_b,index_b`, types and indices 1-based.
void write_edges_csv(std::ostream& os, const Rank2Graph& g);
/// CSV `component_id,mass1,mass2,num_type1,num_type2`, ids 1-based.
void write_components_csv(std::ostream& os, const ComponentMassList& list);

}  // namespace rank2
