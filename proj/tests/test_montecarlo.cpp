#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "keygraph/analysis.hpp"
#include "keygraph/montecarlo.hpp"

using namespace keygraph;

namespace {

SchemeParams scheme(std::vector<double> mu, std::vector<uint32_t> rings, uint64_t pool) {
  return validate_scheme(mu, rings, pool);
}

}  // namespace

TEST_CASE("estimate_from") {
  const std::vector<double> xs = {1.0, 2.0, 3.0, 4.0};
  const auto e = estimate_from(xs, 99);
  CHECK(e.mean == Catch::Approx(2.5));
  // sample std sqrt(5/3), stderr over sqrt(4)
  CHECK(e.stderr_ == Catch::Approx(std::sqrt(5.0 / 3.0) / 2.0));
  CHECK(e.ci95_low == Catch::Approx(e.mean - 1.96 * e.stderr_));
  CHECK(e.trials == 4);
  CHECK(e.master_seed == 99);

  const std::vector<double> one = {0.7};
  CHECK(std::isnan(estimate_from(one, 0).stderr_));
}

TEST_CASE("run_trials is deterministic and thread-count independent") {
  const auto params = scheme({0.5, 0.5}, {2, 4}, 200);
  std::vector<TrialRecord> raw_a, raw_b;
  const auto a = run_trials(params, 60, 40, 7, 1, &raw_a);
  const auto b = run_trials(params, 60, 40, 7, 4, &raw_b);
  CHECK(a.mean_isolated.mean == b.mean_isolated.mean);
  CHECK(a.p_connected.mean == b.p_connected.mean);
  CHECK(a.p_no_isolated.stderr_ == b.p_no_isolated.stderr_);
  REQUIRE(raw_a.size() == raw_b.size());
  for (std::size_t t = 0; t < raw_a.size(); ++t) {
    CHECK(raw_a[t].isolated == raw_b[t].isolated);
    CHECK(raw_a[t].connected == raw_b[t].connected);
  }
  for (const auto& rec : raw_a)
    CHECK(rec.no_iso_but_disconnected == (rec.isolated == 0 && !rec.connected));
}

TEST_CASE("run_trials on the complete-graph regime") {
  const auto est = run_trials(scheme({1.0}, {3}, 4), 12, 25, 3);
  CHECK(est.p_connected.mean == 1.0);
  CHECK(est.p_no_isolated.mean == 1.0);
  CHECK(est.mean_isolated.mean == 0.0);
}

TEST_CASE("first moments match the closed forms") {
  const auto params = scheme({0.5, 0.5}, {5, 10}, 10000);
  const uint32_t n = 500;
  const auto est = run_trials(params, n, 400, 11);
  const double exact_i = expected_isolated(n, params);
  const double exact_y = expected_class1_isolated(n, params);
  CHECK(std::abs(est.mean_isolated.mean - exact_i) < 3.0 * est.mean_isolated.stderr_);
  CHECK(std::abs(est.mean_class1_isolated.mean - exact_y) <
        3.0 * est.mean_class1_isolated.stderr_);

  // connectivity never beats absence of isolated nodes
  CHECK(est.p_connected.mean <=
        est.p_no_isolated.mean +
            3.0 * (est.p_connected.stderr_ + est.p_no_isolated.stderr_) + 1e-12);
}

TEST_CASE("pair isolation frequency matches the second-moment closed form") {
  const auto params = scheme({1.0}, {1}, 4);
  const uint32_t n = 3;
  const uint64_t trials = 200000;
  uint64_t hits = 0;
  for (uint64_t t = 0; t < trials; ++t) {
    const auto g = build_graph(n, params, {2718, t});
    std::vector<uint32_t> degree(n, 0);
    for (const auto& [x, y] : g.edges) {
      ++degree[x];
      ++degree[y];
    }
    if (degree[0] == 0 && degree[1] == 0) ++hits;
  }
  const double expected = pair_class1_isolated_prob(n, params);
  CHECK(expected == Catch::Approx(0.375).margin(1e-12));
  const double freq = static_cast<double>(hits) / static_cast<double>(trials);
  const double se = std::sqrt(expected * (1 - expected) / static_cast<double>(trials));
  CHECK(std::abs(freq - expected) < 3.0 * se);
}

TEST_CASE("sweep produces the zero-one table") {
  ScalingPreset preset;
  preset.pool_rule = PoolRule::nlogn;
  preset.mu = {0.5, 0.5};
  preset.rho = {1.0, 2.0};
  const std::vector<double> c_grid = {0.5, 2.0};
  const std::vector<uint64_t> n_grid = {300, 600};
  const auto cells = sweep(preset, c_grid, n_grid, 60, 5);
  REQUIRE(cells.size() == 4);
  for (const auto& cell : cells) {
    CHECK(cell.status == "ok");
    CHECK(cell.c_achieved >= cell.c_target);
    // 3 SE plus a Poisson-style allowance for cells where every trial is 0
    CHECK(std::abs(cell.mean_isolated.mean - cell.expected_isolated_exact) <
          3.0 * cell.mean_isolated.stderr_ + 3.0 / 60.0);
  }
  // crude zero-one shape even at this small scale
  CHECK(cells[1].p_connected.mean > cells[0].p_connected.mean);
  CHECK(cells[3].p_connected.mean >= 0.8);
  CHECK(cells[2].p_connected.mean <= 0.5);
}

TEST_CASE("sweep flags infeasible cells instead of failing") {
  ScalingPreset preset;
  preset.pool_rule = PoolRule::fixed;
  preset.pool_fixed = 30;
  preset.mu = {1.0};
  preset.rho = {1.0};
  const std::vector<double> c_grid = {1000.0};
  const std::vector<uint64_t> n_grid = {50};
  const auto cells = sweep(preset, c_grid, n_grid, 5, 1);
  REQUIRE(cells.size() == 1);
  CHECK(cells[0].status == "infeasible");
  CHECK(std::isnan(cells[0].p_connected.mean));
}

TEST_CASE("zero-one trend along n at fixed c") {
  ScalingPreset preset;
  preset.pool_rule = PoolRule::nlogn;
  preset.mu = {0.5, 0.5};
  preset.rho = {1.0, 2.0};
  const std::vector<uint64_t> n_grid = {500, 1000, 2000};
  const uint64_t trials = 120;

  const auto high = sweep(preset, std::vector<double>{2.0}, n_grid, trials, 77);
  for (std::size_t i = 1; i < high.size(); ++i) {
    const double slack = 3.0 * (high[i].p_connected.stderr_ + high[i - 1].p_connected.stderr_);
    CHECK(high[i].p_connected.mean >= high[i - 1].p_connected.mean - slack);
  }
  const auto low = sweep(preset, std::vector<double>{0.5}, n_grid, trials, 78);
  for (std::size_t i = 1; i < low.size(); ++i) {
    const double slack = 3.0 * (low[i].p_connected.stderr_ + low[i - 1].p_connected.stderr_);
    CHECK(low[i].p_connected.mean <= low[i - 1].p_connected.mean + slack);
  }
}

TEST_CASE("edge_freq_check against exact probabilities") {
  CHECK(edge_freq_check(scheme({1.0}, {3}, 4), 0, 0, 500, 1).mean == 1.0);  // saturated

  const auto est = edge_freq_check(scheme({1.0}, {2}, 5), 0, 0, 100000, 21);
  CHECK(std::abs(est.mean - 0.7) < 3.0 * est.stderr_);

  const auto small = edge_freq_check(scheme({1.0}, {1}, 4), 0, 0, 100000, 22);
  CHECK(std::abs(small.mean - 0.25) < 3.0 * small.stderr_);
}

TEST_CASE("tree_bound_check") {
  const auto params = scheme({0.5, 0.5}, {1, 2}, 4);
  const auto result = tree_bound_check(params, 2, 100000, 33);
  CHECK(result.bound == Catch::Approx(5.0 / 6.0).epsilon(1e-12));
  CHECK_FALSE(result.vacuous);
  // two-node mixture probability sum mu_i mu_j p_ij = 0.520833...
  CHECK(std::abs(result.p_connected.mean - 0.5208333333) < 3.0 * result.p_connected.stderr_);
  CHECK(result.p_connected.mean <= result.bound + 3.0 * result.p_connected.stderr_);

  const auto three = tree_bound_check(params, 3, 40000, 34);
  CHECK(three.bound == Catch::Approx(std::min(1.0, 3.0 * (5.0 / 6.0) * (5.0 / 6.0))));
  CHECK(three.p_connected.mean <= three.bound + 3.0 * three.p_connected.stderr_);

  // saturated schemes make the bound vacuous
  CHECK(tree_bound_check(scheme({1.0}, {3}, 4), 3, 10, 1).vacuous);
  CHECK_THROWS_AS(tree_bound_check(params, 1, 10, 1), validation_error);
  CHECK_THROWS_AS(tree_bound_check(params, 9, 10, 1), validation_error);
}

TEST_CASE("capture_attack") {
  const auto params = scheme({0.5, 0.5}, {1, 2}, 4);
  SECTION("no capture, no compromise") {
    const auto est = capture_attack(params, 30, 0, 50, 3);
    CHECK(est.pool_coverage.mean == 0.0);
    CHECK(est.compromised_links.mean == 0.0);
  }
  SECTION("coverage matches the closed form") {
    const auto est = capture_attack(params, 40, 3, 4000, 5);
    const double exact = expected_pool_coverage(3, params);
    CHECK(std::abs(est.pool_coverage.mean - exact) < 3.0 * est.pool_coverage.stderr_);
  }
  SECTION("total capture covers exactly the keys present in some ring") {
    const uint32_t n = 15;
    const uint64_t trials = 20;
    const auto est = capture_attack(params, n, n, trials, 8);
    double expected = 0.0;
    for (uint64_t t = 0; t < trials; ++t) {
      const auto g = build_graph(n, params, {8, t});
      std::vector<uint32_t> all(n);
      for (uint32_t x = 0; x < n; ++x) all[x] = x;
      expected += static_cast<double>(union_key_count(g, all)) /
                  static_cast<double>(params.pool_size);
    }
    CHECK(est.pool_coverage.mean == Catch::Approx(expected / trials).margin(1e-15));
    CHECK(est.compromised_links.mean == 0.0);  // no uncaptured links remain
  }
  SECTION("coverage grows with the capture size") {
    double previous = -1.0;
    for (uint64_t s : {0, 2, 5, 10}) {
      const auto est = capture_attack(params, 20, s, 400, 7);
      CHECK(est.pool_coverage.mean >= previous);
      previous = est.pool_coverage.mean;
    }
  }
  SECTION("errors") {
    CHECK_THROWS_AS(capture_attack(params, 10, 11, 5, 1), validation_error);
  }
}
