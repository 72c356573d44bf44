#pragma once

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "keygraph/model.hpp"
#include "keygraph/rng.hpp"

// Sampling of inhomogeneous random key graphs: i.i.d. class labels, key
// rings drawn uniformly without replacement, and an edge between two nodes
// exactly when their rings intersect.

namespace keygraph {

// One realized network. Rings are stored back to back (CSR layout) and
// sorted ascending within each node; edges are unordered pairs (x, y) with
// x < y, sorted and duplicate-free.
struct SampledGraph {
  uint32_t n = 0;
  uint64_t pool_size = 0;
  uint32_t num_classes = 0;
  std::vector<uint32_t> classes;      // 0-based class index per node
  std::vector<uint64_t> ring_offset;  // size n+1
  std::vector<uint32_t> ring_keys;
  std::vector<std::pair<uint32_t, uint32_t>> edges;

  std::span<const uint32_t> ring(uint32_t x) const {
    return {ring_keys.data() + ring_offset[x],
            static_cast<std::size_t>(ring_offset[x + 1] - ring_offset[x])};
  }
};

// True iff the two sorted key lists share an element (linear merge scan).
inline bool intersects(std::span<const uint32_t> a, std::span<const uint32_t> b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) return true;
    if (a[i] < b[j])
      ++i;
    else
      ++j;
  }
  return false;
}

// I.i.d. class labels by inverse CDF over mu; node x draws from its own
// substream so label generation is order-independent.
inline std::vector<uint32_t> assign_classes(uint32_t n, const ClassMix& mix,
                                            const SeedSpec& seed) {
  const std::size_t r = mix.num_classes();
  std::vector<double> cdf(r);
  double acc = 0.0;
  for (std::size_t j = 0; j < r; ++j) {
    acc += mix.mu[j];
    cdf[j] = acc;
  }
  cdf[r - 1] = 1.0;  // guard against rounding at the top

  std::vector<uint32_t> labels(n);
  for (uint32_t x = 0; x < n; ++x) {
    const double u = make_stream(seed, StreamKind::classes, x).next_double();
    uint32_t j = 0;
    while (j + 1 < r && u >= cdf[j]) ++j;
    labels[x] = j;
  }
  return labels;
}

namespace detail {

// Without-replacement k-subset of [0, pool) via hash-probe rejection,
// O(k) expected when k <= pool/2; larger k samples the complement.
inline void sample_subset_into(std::vector<uint32_t>& out, uint32_t k, uint64_t pool,
                               Philox4x32& stream) {
  out.clear();
  if (k == 0) return;
  if (k <= pool / 2) {
    std::size_t cap = 8;
    while (cap < 2 * static_cast<std::size_t>(k)) cap <<= 1;
    const std::size_t mask = cap - 1;
    std::vector<uint32_t> table(cap, 0xFFFFFFFFu);
    while (out.size() < k) {
      const uint32_t key = static_cast<uint32_t>(stream.uniform_index(pool));
      std::size_t slot = (static_cast<std::size_t>(key) * 0x9E3779B97F4A7C15ull) & mask;
      bool seen = false;
      while (table[slot] != 0xFFFFFFFFu) {
        if (table[slot] == key) {
          seen = true;
          break;
        }
        slot = (slot + 1) & mask;
      }
      if (seen) continue;
      table[slot] = key;
      out.push_back(key);
    }
    std::sort(out.begin(), out.end());
  } else {
    std::vector<uint32_t> excluded;
    sample_subset_into(excluded, static_cast<uint32_t>(pool - k), pool, stream);
    out.reserve(k);
    std::size_t e = 0;
    for (uint64_t key = 0; key < pool; ++key) {
      if (e < excluded.size() && excluded[e] == key) {
        ++e;
        continue;
      }
      out.push_back(static_cast<uint32_t>(key));
    }
  }
}

}  // namespace detail

// Uniformly random k-subset of the pool, sorted ascending.
inline std::vector<uint32_t> sample_ring(uint32_t k, uint64_t pool, Philox4x32& stream) {
  if (k < 1 || k >= pool)
    throw validation_error("sample_ring: ring size must satisfy 1 <= K < P");
  std::vector<uint32_t> ring;
  detail::sample_subset_into(ring, k, pool, stream);
  return ring;
}

namespace detail {

inline void edges_by_key_index(SampledGraph& g) {
  // Bucket nodes by key, then emit every pair inside a bucket. Buckets come
  // either from a counting pass over the pool or, when the pool is much
  // larger than the total key mass, from sorting (key, node) pairs.
  std::vector<uint64_t> packed;
  const uint64_t mass = g.ring_keys.size();
  if (g.pool_size <= std::max<uint64_t>(1 << 20, 16 * mass)) {
    std::vector<uint32_t> count(g.pool_size, 0);
    for (uint32_t key : g.ring_keys) ++count[key];
    std::vector<uint64_t> start(g.pool_size + 1, 0);
    for (uint64_t key = 0; key < g.pool_size; ++key) start[key + 1] = start[key] + count[key];
    std::vector<uint32_t> holder(mass);
    std::vector<uint64_t> cursor = start;
    for (uint32_t x = 0; x < g.n; ++x)
      for (uint32_t key : g.ring(x)) holder[cursor[key]++] = x;
    for (uint64_t key = 0; key < g.pool_size; ++key)
      for (uint64_t a = start[key]; a < start[key + 1]; ++a)
        for (uint64_t b = a + 1; b < start[key + 1]; ++b)
          packed.push_back((static_cast<uint64_t>(holder[a]) << 32) | holder[b]);
  } else {
    std::vector<std::pair<uint32_t, uint32_t>> occ;
    occ.reserve(mass);
    for (uint32_t x = 0; x < g.n; ++x)
      for (uint32_t key : g.ring(x)) occ.emplace_back(key, x);
    std::sort(occ.begin(), occ.end());
    std::size_t lo = 0;
    while (lo < occ.size()) {
      std::size_t hi = lo + 1;
      while (hi < occ.size() && occ[hi].first == occ[lo].first) ++hi;
      for (std::size_t a = lo; a < hi; ++a)
        for (std::size_t b = a + 1; b < hi; ++b)
          packed.push_back((static_cast<uint64_t>(occ[a].second) << 32) | occ[b].second);
      lo = hi;
    }
  }
  std::sort(packed.begin(), packed.end());
  packed.erase(std::unique(packed.begin(), packed.end()), packed.end());
  g.edges.reserve(packed.size());
  for (uint64_t e : packed)
    g.edges.emplace_back(static_cast<uint32_t>(e >> 32), static_cast<uint32_t>(e));
}

inline void edges_pairwise(SampledGraph& g) {
  for (uint32_t x = 0; x < g.n; ++x)
    for (uint32_t y = x + 1; y < g.n; ++y)
      if (intersects(g.ring(x), g.ring(y))) g.edges.emplace_back(x, y);
}

}  // namespace detail

// Samples one graph. Nodes holding a common key are found through a
// key -> nodes index in the sparse regime (P >= n); the dense regime falls
// back to a pairwise intersection scan.
inline SampledGraph build_graph(uint32_t n, const SchemeParams& params, const SeedSpec& seed) {
  SampledGraph g;
  g.n = n;
  g.pool_size = params.pool_size;
  g.num_classes = static_cast<uint32_t>(params.num_classes());
  g.classes = assign_classes(n, params.mix, seed);

  g.ring_offset.resize(static_cast<std::size_t>(n) + 1);
  g.ring_offset[0] = 0;
  for (uint32_t x = 0; x < n; ++x)
    g.ring_offset[x + 1] = g.ring_offset[x] + params.ring_size(g.classes[x]);
  g.ring_keys.resize(g.ring_offset[n]);

  std::vector<uint32_t> scratch;
  for (uint32_t x = 0; x < n; ++x) {
    auto stream = make_stream(seed, StreamKind::ring, x);
    detail::sample_subset_into(scratch, params.ring_size(g.classes[x]), params.pool_size,
                               stream);
    std::copy(scratch.begin(), scratch.end(), g.ring_keys.begin() + g.ring_offset[x]);
  }

  if (params.pool_size < n)
    detail::edges_pairwise(g);
  else
    detail::edges_by_key_index(g);
  return g;
}

// Line-oriented debug dump: "n P r" header, one "class key..." line per
// node (classes printed 1-based), then an "edges" sentinel and one
// "x y" pair per line.
inline void write_graph_dump(const SampledGraph& g, std::ostream& os) {
  os << g.n << ' ' << g.pool_size << ' ' << g.num_classes << '\n';
  for (uint32_t x = 0; x < g.n; ++x) {
    os << g.classes[x] + 1;
    for (uint32_t key : g.ring(x)) os << ' ' << key;
    os << '\n';
  }
  os << "edges\n";
  for (const auto& [x, y] : g.edges) os << x << ' ' << y << '\n';
}

}  // namespace keygraph
