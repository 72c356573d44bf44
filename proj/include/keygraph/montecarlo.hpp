#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "keygraph/analysis.hpp"
#include "keygraph/exactprob.hpp"
#include "keygraph/model.hpp"
#include "keygraph/sampler.hpp"
#include "keygraph/scaling.hpp"

// Reproducible trial harness. Trials are independent by construction
// (trial t only ever touches streams keyed by t), so they are distributed
// over a worker pool and written into trial-indexed slots; aggregation is
// a sequential sum over those slots, which makes every estimate identical
// regardless of the number of workers.

namespace keygraph {

struct TrialRecord {
  uint64_t trial = 0;
  uint64_t isolated = 0;         // I_n
  uint64_t class1_isolated = 0;  // Y_n
  bool connected = false;
  uint64_t component_count = 0;
  bool no_iso_but_disconnected = false;
};

struct Estimate {
  double mean = 0.0;
  double stderr_ = 0.0;  // sample std / sqrt(trials); NaN when trials < 2
  double ci95_low = 0.0;
  double ci95_high = 0.0;
  uint64_t trials = 0;
  uint64_t master_seed = 0;
};

inline Estimate estimate_from(std::span<const double> values, uint64_t master_seed) {
  Estimate e;
  e.trials = values.size();
  e.master_seed = master_seed;
  if (values.empty()) {
    e.mean = e.stderr_ = e.ci95_low = e.ci95_high = std::nan("");
    return e;
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  e.mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) {
    e.stderr_ = std::nan("");
  } else {
    double sq = 0.0;
    for (double v : values) sq += (v - e.mean) * (v - e.mean);
    const double sample_std = std::sqrt(sq / static_cast<double>(values.size() - 1));
    e.stderr_ = sample_std / std::sqrt(static_cast<double>(values.size()));
  }
  e.ci95_low = e.mean - 1.96 * e.stderr_;
  e.ci95_high = e.mean + 1.96 * e.stderr_;
  return e;
}

namespace detail {

template <typename Body>
inline void parallel_trials(uint64_t trials, unsigned threads, Body&& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  if (trials < 2 || threads <= 1) {
    for (uint64_t t = 0; t < trials; ++t) body(t);
    return;
  }
  threads = static_cast<unsigned>(std::min<uint64_t>(threads, trials));
  std::atomic<uint64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const uint64_t t = next.fetch_add(1, std::memory_order_relaxed);
        if (t >= trials) return;
        try {
          body(t);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

struct IsolationEstimates {
  Estimate p_no_isolated;
  Estimate p_connected;
  Estimate mean_isolated;         // E[I_n]
  Estimate mean_class1_isolated;  // E[Y_n]
  Estimate p_no_iso_disconnected;
};

// Runs `trials` independent graphs; trial t is fully determined by
// SeedSpec(master_seed, t). Optionally hands back the raw records.
inline IsolationEstimates run_trials(const SchemeParams& params, uint32_t n, uint64_t trials,
                                     uint64_t master_seed, unsigned threads = 0,
                                     std::vector<TrialRecord>* raw = nullptr) {
  if (trials < 1) throw validation_error("run_trials: trials must be at least 1");
  std::vector<TrialRecord> records(trials);
  detail::parallel_trials(trials, threads, [&](uint64_t t) {
    const SampledGraph g = build_graph(n, params, SeedSpec{master_seed, t});
    const GraphStats stats = graph_stats(g);
    TrialRecord& rec = records[t];
    rec.trial = t;
    rec.isolated = stats.isolated_total;
    rec.class1_isolated = stats.isolated_by_class[0];
    rec.connected = stats.connected;
    rec.component_count = stats.component_count;
    rec.no_iso_but_disconnected = stats.isolated_total == 0 && !stats.connected;
  });

  std::vector<double> iso0(trials), conn(trials), iso(trials), cls1(trials), nobut(trials);
  for (uint64_t t = 0; t < trials; ++t) {
    iso0[t] = records[t].isolated == 0 ? 1.0 : 0.0;
    conn[t] = records[t].connected ? 1.0 : 0.0;
    iso[t] = static_cast<double>(records[t].isolated);
    cls1[t] = static_cast<double>(records[t].class1_isolated);
    nobut[t] = records[t].no_iso_but_disconnected ? 1.0 : 0.0;
  }

  IsolationEstimates out;
  out.p_no_isolated = estimate_from(iso0, master_seed);
  out.p_connected = estimate_from(conn, master_seed);
  out.mean_isolated = estimate_from(iso, master_seed);
  out.mean_class1_isolated = estimate_from(cls1, master_seed);
  out.p_no_iso_disconnected = estimate_from(nobut, master_seed);
  if (raw) *raw = std::move(records);
  return out;
}

struct SweepCell {
  uint64_t n = 0;
  double c_target = 0.0;
  double c_achieved = 0.0;
  uint64_t pool = 0;
  std::vector<uint32_t> ring_sizes;
  Estimate p_no_isolated;
  Estimate p_connected;
  Estimate mean_isolated;
  double expected_isolated_exact = 0.0;
  std::string status = "ok";  // "infeasible" rows carry NaN estimates
  std::vector<TrialRecord> records;  // filled only when keep_records
};

// Zero-one-law table: for each (n, c) cell, dimension the scheme via the
// preset with target c, then estimate isolation and connectivity.
inline std::vector<SweepCell> sweep(const ScalingPreset& preset, std::span<const double> c_grid,
                                    std::span<const uint64_t> n_grid, uint64_t trials,
                                    uint64_t master_seed, unsigned threads = 0,
                                    bool keep_records = false) {
  if (c_grid.empty() || n_grid.empty()) throw validation_error("sweep: empty grid");
  for (uint64_t n : n_grid)
    if (n > 0xFFFFFFFFull) throw validation_error("sweep: n exceeds the node-id envelope");
  std::vector<SweepCell> cells;
  for (uint64_t n : n_grid) {
    for (double c : c_grid) {
      SweepCell cell;
      cell.n = n;
      cell.c_target = c;
      ScalingPreset local = preset;
      local.target_c = c;
      try {
        const SchemeParams params = instantiate(local, n);
        cell.pool = params.pool_size;
        cell.ring_sizes = params.mix.ring_sizes;
        cell.c_achieved = achieved_c(n, params);
        cell.expected_isolated_exact = expected_isolated(n, params);
        std::vector<TrialRecord> records;
        const IsolationEstimates est =
            run_trials(params, static_cast<uint32_t>(n), trials, master_seed, threads,
                       keep_records ? &records : nullptr);
        cell.p_no_isolated = est.p_no_isolated;
        cell.p_connected = est.p_connected;
        cell.mean_isolated = est.mean_isolated;
        cell.records = std::move(records);
      } catch (const infeasible_error&) {
        cell.status = "infeasible";
        cell.c_achieved = std::nan("");
        cell.expected_isolated_exact = std::nan("");
        for (Estimate* e : {&cell.p_no_isolated, &cell.p_connected, &cell.mean_isolated}) {
          e->mean = e->stderr_ = e->ci95_low = e->ci95_high = std::nan("");
          e->master_seed = master_seed;
        }
      }
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

// Empirical edge frequency between forced classes (i, j) over independent
// ring pairs; the exact p_ij is its mean.
inline Estimate edge_freq_check(const SchemeParams& params, std::size_t i, std::size_t j,
                                uint64_t pairs, uint64_t master_seed, unsigned threads = 0) {
  if (pairs < 1) throw validation_error("edge_freq_check: pairs must be at least 1");
  if (i >= params.num_classes() || j >= params.num_classes())
    throw validation_error("edge_freq_check: class index out of range");
  std::vector<double> hits(pairs);
  detail::parallel_trials(pairs, threads, [&](uint64_t t) {
    auto stream_a = make_stream(master_seed, t, StreamKind::pair, 0);
    auto stream_b = make_stream(master_seed, t, StreamKind::pair, 1);
    const auto ring_a = sample_ring(params.ring_size(i), params.pool_size, stream_a);
    const auto ring_b = sample_ring(params.ring_size(j), params.pool_size, stream_b);
    hits[t] = intersects(ring_a, ring_b) ? 1.0 : 0.0;
  });
  return estimate_from(hits, master_seed);
}

struct TreeBoundResult {
  Estimate p_connected;  // subgraph on ell random nodes
  double bound = 0.0;    // min(1, ell^(ell-2) * p_rr^(ell-1))
  bool vacuous = false;  // uncapped bound already >= 1
};

// Checks the spanning-tree union bound: the probability that ell nodes
// form a connected subgraph never exceeds ell^(ell-2) * p_rr^(ell-1)
// (Cayley tree count times the largest per-edge probability).
inline TreeBoundResult tree_bound_check(const SchemeParams& params, uint32_t ell,
                                        uint64_t trials, uint64_t master_seed,
                                        unsigned threads = 0) {
  if (ell < 2 || ell > 8) throw validation_error("tree_bound_check: ell must lie in [2, 8]");
  if (trials < 1) throw validation_error("tree_bound_check: trials must be at least 1");
  std::vector<double> conn(trials);
  detail::parallel_trials(trials, threads, [&](uint64_t t) {
    const SampledGraph g = build_graph(ell, params, SeedSpec{master_seed, t});
    conn[t] = graph_stats(g).connected ? 1.0 : 0.0;
  });
  TreeBoundResult result;
  result.p_connected = estimate_from(conn, master_seed);
  const double prr =
      edge_prob(params.num_classes() - 1, params.num_classes() - 1, params);
  const double raw = std::pow(static_cast<double>(ell), static_cast<double>(ell) - 2.0) *
                     std::pow(prr, static_cast<double>(ell) - 1.0);
  result.vacuous = raw >= 1.0;
  result.bound = std::min(1.0, raw);
  return result;
}

struct CaptureEstimates {
  Estimate pool_coverage;      // fraction of the key pool held by captured nodes
  Estimate compromised_links;  // fraction of uncaptured links whose shared keys are all covered
};

// Node-capture resiliency: capture s uniformly random nodes per trial and
// measure how much of the pool and how many of the remaining secure links
// the adversary learns. A link is compromised when every key shared by its
// endpoints is held by some captured node.
inline CaptureEstimates capture_attack(const SchemeParams& params, uint32_t n, uint64_t s,
                                       uint64_t trials, uint64_t master_seed,
                                       unsigned threads = 0) {
  if (s > n) throw validation_error("capture_attack: captured count exceeds node count");
  if (trials < 1) throw validation_error("capture_attack: trials must be at least 1");
  std::vector<double> coverage(trials), broken(trials);
  detail::parallel_trials(trials, threads, [&](uint64_t t) {
    const SampledGraph g = build_graph(n, params, SeedSpec{master_seed, t});

    auto capture_stream = make_stream(master_seed, t, StreamKind::capture, 0);
    std::vector<uint32_t> captured;
    detail::sample_subset_into(captured, static_cast<uint32_t>(s), n, capture_stream);
    std::vector<char> is_captured(n, 0);
    for (uint32_t x : captured) is_captured[x] = 1;

    std::unordered_set<uint32_t> covered;
    for (uint32_t x : captured) {
      const auto ring = g.ring(x);
      covered.insert(ring.begin(), ring.end());
    }
    coverage[t] = static_cast<double>(covered.size()) / static_cast<double>(g.pool_size);

    uint64_t secure = 0, compromised = 0;
    for (const auto& [x, y] : g.edges) {
      if (is_captured[x] || is_captured[y]) continue;
      ++secure;
      const auto ra = g.ring(x);
      const auto rb = g.ring(y);
      bool all_covered = true;
      std::size_t a = 0, b = 0;
      while (a < ra.size() && b < rb.size()) {
        if (ra[a] == rb[b]) {
          if (!covered.count(ra[a])) {
            all_covered = false;
            break;
          }
          ++a;
          ++b;
        } else if (ra[a] < rb[b]) {
          ++a;
        } else {
          ++b;
        }
      }
      if (all_covered) ++compromised;
    }
    broken[t] = secure == 0 ? 0.0 : static_cast<double>(compromised) / static_cast<double>(secure);
  });
  CaptureEstimates out;
  out.pool_coverage = estimate_from(coverage, master_seed);
  out.compromised_links = estimate_from(broken, master_seed);
  return out;
}

}  // namespace keygraph
