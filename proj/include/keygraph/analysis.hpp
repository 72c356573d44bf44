#pragma once

#include <cstdint>
#include <numeric>
#include <span>
#include <unordered_set>
#include <vector>

#include "keygraph/model.hpp"
#include "keygraph/sampler.hpp"

// Structural observables of a sampled graph: isolation counts, connectivity
// via union-find, and the key-coverage statistics of node subsets.

namespace keygraph {

struct GraphStats {
  uint64_t isolated_total = 0;
  std::vector<uint64_t> isolated_by_class;  // entry 0 is the class-1 count
  bool connected = false;
  uint64_t component_count = 0;
  uint64_t largest_component = 0;
};

namespace detail {

struct DisjointSets {
  std::vector<uint32_t> parent;
  std::vector<uint32_t> size;

  explicit DisjointSets(uint32_t n) : parent(n), size(n, 1) {
    std::iota(parent.begin(), parent.end(), 0);
  }

  uint32_t find(uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }

  void unite(uint32_t a, uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size[a] < size[b]) std::swap(a, b);
    parent[b] = a;
    size[a] += size[b];
  }
};

}  // namespace detail

// Isolation by degree count, components by union-find over the edge list.
// A single-node graph counts as connected.
inline GraphStats graph_stats(const SampledGraph& g) {
  GraphStats stats;
  stats.isolated_by_class.assign(g.num_classes, 0);
  if (g.n == 0) {
    stats.connected = true;
    return stats;
  }

  std::vector<uint32_t> degree(g.n, 0);
  detail::DisjointSets sets(g.n);
  for (const auto& [x, y] : g.edges) {
    ++degree[x];
    ++degree[y];
    sets.unite(x, y);
  }

  for (uint32_t x = 0; x < g.n; ++x) {
    if (degree[x] == 0) {
      ++stats.isolated_total;
      ++stats.isolated_by_class[g.classes[x]];
    }
    if (sets.find(x) == x) {
      ++stats.component_count;
      stats.largest_component = std::max<uint64_t>(stats.largest_component, sets.size[x]);
    }
  }
  stats.connected = stats.component_count == 1;
  return stats;
}

// Number of distinct keys held jointly by the given nodes.
inline uint64_t union_key_count(const SampledGraph& g, std::span<const uint32_t> nodes) {
  if (nodes.empty()) throw validation_error("union_key_count: node subset must be nonempty");
  std::unordered_set<uint32_t> seen;
  for (uint32_t x : nodes) {
    if (x >= g.n) throw validation_error("union_key_count: node id out of range");
    const auto ring = g.ring(x);
    seen.insert(ring.begin(), ring.end());
  }
  return seen.size();
}

// Coverage thresholds X_l with breakpoint L = min(floor(P/K1), floor(n/2)):
// X_l = floor(beta*l*K1) up to the breakpoint and floor(gamma*P) past it.
// A set of l nodes jointly holding at most X_l keys is anomalously
// key-poor; beta and gamma must lie in (0, 1/2).
struct EventThresholds {
  double beta = 0.0;
  double gamma = 0.0;
  uint64_t breakpoint = 0;      // L_n
  std::vector<uint64_t> limits;  // X_1 .. X_n

  uint64_t x(uint64_t ell) const { return limits[ell - 1]; }
};

inline EventThresholds event_thresholds(uint64_t n, uint32_t k1, uint64_t pool, double beta,
                                        double gamma) {
  if (!(beta > 0.0) || !(beta < 0.5))
    throw validation_error("event_thresholds: beta must lie in (0, 1/2)");
  if (!(gamma > 0.0) || !(gamma < 0.5))
    throw validation_error("event_thresholds: gamma must lie in (0, 1/2)");
  if (k1 < 1) throw validation_error("event_thresholds: K1 must be at least 1");

  EventThresholds t;
  t.beta = beta;
  t.gamma = gamma;
  t.breakpoint = std::min<uint64_t>(pool / k1, n / 2);
  t.limits.resize(n);
  const uint64_t tail = static_cast<uint64_t>(gamma * static_cast<double>(pool));
  for (uint64_t ell = 1; ell <= n; ++ell)
    t.limits[ell - 1] =
        ell <= t.breakpoint
            ? static_cast<uint64_t>(beta * static_cast<double>(ell) * static_cast<double>(k1))
            : tail;
  return t;
}

struct PrefixUnionRow {
  uint64_t ell = 0;
  uint64_t union_keys = 0;  // U_l over nodes {1..l}
  uint64_t limit = 0;       // X_l
  bool violated = false;    // U_l <= X_l
};

// U_l along node prefixes. Exchangeability of the nodes makes prefixes an
// unbiased probe of the subset-coverage event without enumerating all
// C(n, l) subsets.
inline constexpr uint64_t kDefaultPrefixCap = 32;

inline std::vector<PrefixUnionRow> prefix_union_profile(const SampledGraph& g,
                                                        const EventThresholds& thresholds);

inline std::vector<PrefixUnionRow> prefix_union_profile(const SampledGraph& g,
                                                        uint64_t max_ell,
                                                        const EventThresholds& thresholds) {
  if (max_ell < 1 || max_ell > g.n)
    throw validation_error("prefix_union_profile: max_ell must lie in [1, n]");
  std::vector<PrefixUnionRow> rows;
  rows.reserve(max_ell);
  std::unordered_set<uint32_t> seen;
  for (uint64_t ell = 1; ell <= max_ell; ++ell) {
    const auto ring = g.ring(static_cast<uint32_t>(ell - 1));
    seen.insert(ring.begin(), ring.end());
    PrefixUnionRow row;
    row.ell = ell;
    row.union_keys = seen.size();
    row.limit = thresholds.x(ell);
    row.violated = row.union_keys <= row.limit;
    rows.push_back(row);
  }
  return rows;
}

inline std::vector<PrefixUnionRow> prefix_union_profile(const SampledGraph& g,
                                                        const EventThresholds& thresholds) {
  return prefix_union_profile(g, std::min<uint64_t>(g.n, kDefaultPrefixCap), thresholds);
}

}  // namespace keygraph
