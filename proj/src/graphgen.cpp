#include "rank2/graphgen.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>

namespace rank2 {

AliasTable::AliasTable(std::span<const double> weights) {
  const std::size_t n = weights.size();
  if (n == 0) return;
  if (n > std::numeric_limits<std::uint32_t>::max()) throw Error(Errc::InvalidArgument, "too many weights");
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw Error(Errc::InvalidArgument, "alias table needs positive total weight");
  prob_.resize(n);
  alias_.resize(n);
  std::vector<double> scaled(n);
  std::vector<std::uint32_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = weights[i] * static_cast<double>(n) / total;
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const std::uint32_t s = small.back(), l = large.back();
    small.pop_back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  for (std::uint32_t i : large) {
    prob_[i] = 1.0;
    alias_[i] = i;
  }
  for (std::uint32_t i : small) {
    prob_[i] = 1.0;
    alias_[i] = i;
  }
}

std::size_t AliasTable::sample(Rng& rng) const {
  const double u = uniform_open(rng) * static_cast<double>(prob_.size());
  auto i = static_cast<std::size_t>(u);
  if (i >= prob_.size()) i = prob_.size() - 1;
  return (u - static_cast<double>(i)) < prob_[i] ? i : alias_[i];
}

namespace {

// Weight-proportional endpoint sampler; uniform for constant weights.
class EndpointSampler {
 public:
  explicit EndpointSampler(const WeightVector& w) : n_(w.size()), uniform_(w.is_constant()) {
    if (!uniform_) table_ = AliasTable(w.entries());
  }
  std::uint32_t operator()(Rng& rng) const {
    if (uniform_) {
      auto i = static_cast<std::size_t>(uniform_open(rng) * static_cast<double>(n_));
      return static_cast<std::uint32_t>(std::min(i, n_ - 1));
    }
    return static_cast<std::uint32_t>(table_.sample(rng));
  }

 private:
  std::size_t n_;
  bool uniform_;
  AliasTable table_;
};

// Calls fn(type_a, a, type_b, b) for every multi-edge, self-loops removed.
template <class Fn>
void for_each_multiedge(const ModelSpec& spec, Rng& rng, Fn&& fn) {
  const std::array<const WeightVector*, 2> w{&spec.w1, &spec.w2};
  std::array<std::optional<EndpointSampler>, 2> sampler;
  for (int i = 0; i < 2; ++i)
    if (!w[i]->empty()) sampler[i].emplace(*w[i]);
  const std::array<std::pair<int, int>, 3> blocks{{{0, 0}, {0, 1}, {1, 1}}};
  for (auto [i, j] : blocks) {
    if (w[i]->empty() || w[j]->empty()) continue;
    double mu = spec.Q[i][j] * w[i]->sigma1() * w[j]->sigma1();
    if (i == j) mu *= 0.5;
    if (!(mu > 0.0)) continue;
    std::poisson_distribution<std::uint64_t> pois(mu);
    const std::uint64_t count = pois(rng);
    for (std::uint64_t e = 0; e < count; ++e) {
      const std::uint32_t a = (*sampler[i])(rng);
      const std::uint32_t b = (*sampler[j])(rng);
      if (i == j && a == b) continue;
      fn(i, a, j, b);
    }
  }
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n, -1) {}

  std::uint32_t find(std::uint32_t v) {
    std::uint32_t r = v;
    while (parent_[r] >= 0) r = static_cast<std::uint32_t>(parent_[r]);
    while (parent_[v] >= 0) {
      const auto next = static_cast<std::uint32_t>(parent_[v]);
      parent_[v] = static_cast<std::int32_t>(r);
      v = next;
    }
    return r;
  }

  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (parent_[a] > parent_[b]) std::swap(a, b);
    parent_[a] += parent_[b];
    parent_[b] = static_cast<std::int32_t>(a);
  }

  std::size_t size_of_root(std::uint32_t r) const { return static_cast<std::size_t>(-parent_[r]); }

 private:
  std::vector<std::int32_t> parent_;
};

bool mass_order(const Vec2& ma, std::uint64_t va, const Vec2& mb, std::uint64_t vb) {
  if (ma[0] != mb[0]) return ma[0] > mb[0];
  if (ma[1] != mb[1]) return ma[1] > mb[1];
  return va < vb;
}

ComponentMassList permuted(const ComponentMassList& in, const std::vector<std::size_t>& perm) {
  ComponentMassList out;
  out.masses.reserve(perm.size());
  out.counts.reserve(perm.size());
  out.min_vertex.reserve(perm.size());
  std::vector<std::uint32_t> new_id(in.size(), std::numeric_limits<std::uint32_t>::max());
  for (std::size_t k = 0; k < perm.size(); ++k) {
    out.masses.push_back(in.masses[perm[k]]);
    out.counts.push_back(in.counts[perm[k]]);
    out.min_vertex.push_back(in.min_vertex[perm[k]]);
    new_id[perm[k]] = static_cast<std::uint32_t>(k);
  }
  if (!in.membership.empty()) {
    out.membership.resize(in.membership.size());
    for (std::size_t v = 0; v < in.membership.size(); ++v) out.membership[v] = new_id[in.membership[v]];
  }
  return out;
}

ComponentMassList collect(const ModelSpec& spec, UnionFind& uf, std::size_t top_k, bool with_membership) {
  const std::size_t n1 = spec.w1.size(), n = n1 + spec.w2.size();
  constexpr auto kNone = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> slot(n, kNone);
  std::vector<std::array<CompensatedSum, 2>> acc;
  ComponentMassList list;
  std::array<std::size_t, 2> singletons_kept{0, 0};
  if (with_membership) list.membership.resize(n);

  for (std::size_t v = 0; v < n; ++v) {
    const int type = v < n1 ? 0 : 1;
    const double w = type == 0 ? spec.w1[v] : spec.w2[v - n1];
    const auto vv = static_cast<std::uint32_t>(v);
    const std::uint32_t r = uf.find(vv);
    if (uf.size_of_root(r) == 1) {
      // Within a type, later singletons never outrank earlier ones.
      if (top_k > 0 && singletons_kept[type] >= top_k) continue;
      ++singletons_kept[type];
      Vec2 m{0.0, 0.0};
      m[type] = w;
      std::array<std::size_t, 2> c{0, 0};
      c[type] = 1;
      if (with_membership) list.membership[v] = static_cast<std::uint32_t>(list.masses.size());
      list.masses.push_back(m);
      list.counts.push_back(c);
      list.min_vertex.push_back(v);
      acc.emplace_back();
      continue;
    }
    if (slot[r] == kNone) {
      slot[r] = static_cast<std::uint32_t>(list.masses.size());
      list.masses.push_back({0.0, 0.0});
      list.counts.push_back({0, 0});
      list.min_vertex.push_back(v);
      acc.emplace_back();
    }
    const std::uint32_t id = slot[r];
    acc[id][type].add(w);
    ++list.counts[id][type];
    if (with_membership) list.membership[v] = id;
  }
  for (std::size_t c = 0; c < list.masses.size(); ++c) {
    if (list.counts[c][0] + list.counts[c][1] > 1) list.masses[c] = {acc[c][0].value(), acc[c][1].value()};
  }

  std::vector<std::size_t> perm(list.size());
  std::iota(perm.begin(), perm.end(), 0);
  auto cmp = [&](std::size_t a, std::size_t b) {
    return mass_order(list.masses[a], list.min_vertex[a], list.masses[b], list.min_vertex[b]);
  };
  if (top_k > 0 && top_k < perm.size()) {
    std::partial_sort(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(top_k), perm.end(), cmp);
    perm.resize(top_k);
  } else {
    std::sort(perm.begin(), perm.end(), cmp);
  }
  return permuted(list, perm);
}

std::uint32_t flat(std::size_t n1, int type, std::uint32_t idx) {
  return type == 0 ? idx : static_cast<std::uint32_t>(n1 + idx);
}

void check_size(const ModelSpec& spec) {
  if (spec.w1.size() + spec.w2.size() >= static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max()))
    throw Error(Errc::InvalidArgument, "too many vertices");
}

}  // namespace

Rank2Graph sample_graph(const ModelSpec& spec, Rng& rng) {
  check_size(spec);
  Rank2Graph g;
  g.spec = &spec;
  for_each_multiedge(spec, rng, [&](int i, std::uint32_t a, int j, std::uint32_t b) {
    Edge e{static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(j), a, b};
    if (i == j && b < a) std::swap(e.a, e.b);
    g.edges.push_back(e);
  });
  std::sort(g.edges.begin(), g.edges.end());
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
  return g;
}

ComponentMassList components(const Rank2Graph& g) {
  if (g.spec == nullptr) throw Error(Errc::InvalidArgument, "graph has no spec");
  const ModelSpec& spec = *g.spec;
  const std::size_t n1 = spec.w1.size();
  UnionFind uf(n1 + spec.w2.size());
  for (const Edge& e : g.edges) uf.unite(flat(n1, e.type_a, e.a), flat(n1, e.type_b, e.b));
  return collect(spec, uf, 0, true);
}

ComponentMassList sample_component_masses(const ModelSpec& spec, Rng& rng, std::size_t top_k) {
  check_size(spec);
  const std::size_t n1 = spec.w1.size();
  UnionFind uf(n1 + spec.w2.size());
  for_each_multiedge(spec, rng, [&](int i, std::uint32_t a, int j, std::uint32_t b) {
    uf.unite(flat(n1, i, a), flat(n1, j, b));
  });
  return collect(spec, uf, top_k, top_k == 0);
}

ComponentMassList ord_by(const ComponentMassList& list, MassCoordinate coordinate) {
  std::vector<std::size_t> perm(list.size());
  std::iota(perm.begin(), perm.end(), 0);
  auto key = [&](std::size_t c) -> std::pair<double, double> {
    const Vec2& m = list.masses[c];
    switch (coordinate) {
      case MassCoordinate::First: return {m[0], m[1]};
      case MassCoordinate::Second: return {m[1], m[0]};
      case MassCoordinate::Total: return {m[0] + m[1], m[0]};
    }
    return {0.0, 0.0};
  };
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return key(a) > key(b); });
  return permuted(list, perm);
}

void write_edges_csv(std::ostream& os, const Rank2Graph& g) {
  os << "type_a,index_a,type_b,index_b\n";
  for (const Edge& e : g.edges)
    os << e.type_a + 1 << ',' << e.a + 1 << ',' << e.type_b + 1 << ',' << e.b + 1 << '\n';
}

void write_components_csv(std::ostream& os, const ComponentMassList& list) {
  const auto old = os.precision(17);
  os << "component_id,mass1,mass2,num_type1,num_type2\n";
  for (std::size_t c = 0; c < list.size(); ++c)
    os << c + 1 << ',' << list.masses[c][0] << ',' << list.masses[c][1] << ',' << list.counts[c][0] << ','
       << list.counts[c][1] << '\n';
  os.precision(old);
}

}  // namespace rank2
