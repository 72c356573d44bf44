#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <map>
#include <sstream>

#include "keygraph/exactprob.hpp"
#include "keygraph/sampler.hpp"
#include "oracles.hpp"

using namespace keygraph;

namespace {

SchemeParams scheme(std::vector<double> mu, std::vector<uint32_t> rings, uint64_t pool) {
  return validate_scheme(mu, rings, pool);
}

}  // namespace

TEST_CASE("intersects on sorted key lists") {
  const std::vector<uint32_t> a{0, 1}, b{2, 3}, c{1, 2};
  CHECK_FALSE(intersects(a, b));
  CHECK(intersects(a, c));
  CHECK(intersects(a, a));
}

TEST_CASE("assign_classes marginals and determinism") {
  const auto degenerate = scheme({1.0}, {2}, 10);
  const auto labels = assign_classes(50, degenerate.mix, {1, 0});
  for (uint32_t label : labels) CHECK(label == 0);

  const auto half = scheme({0.5, 0.5}, {1, 2}, 10);
  const uint32_t n = 100000;
  const auto big = assign_classes(n, half.mix, {7, 0});
  uint64_t ones = 0;
  for (uint32_t label : big) ones += label == 0 ? 1 : 0;
  // binomial: 3 standard errors of n/2
  CHECK(std::abs(static_cast<double>(ones) - n / 2.0) < 3.0 * std::sqrt(n * 0.25));

  CHECK(assign_classes(n, half.mix, {7, 0}) == big);
  CHECK(assign_classes(n, half.mix, {7, 1}) != big);
}

TEST_CASE("sample_ring basics") {
  auto stream = make_stream(5, 0, StreamKind::ring, 0);
  for (int rep = 0; rep < 200; ++rep) {
    const auto ring = sample_ring(3, 9, stream);
    REQUIRE(ring.size() == 3);
    CHECK(ring[0] < ring[1]);
    CHECK(ring[1] < ring[2]);
    CHECK(ring.back() < 9);
  }
  CHECK_THROWS_AS(sample_ring(5, 5, stream), validation_error);
  CHECK_THROWS_AS(sample_ring(0, 5, stream), validation_error);

  // K = 1 is a plain uniform key
  std::vector<int> counts(6, 0);
  for (int rep = 0; rep < 60000; ++rep) ++counts[sample_ring(1, 6, stream)[0]];
  for (int c : counts) CHECK(std::abs(c - 10000.0) < 3.0 * std::sqrt(10000.0 * (5.0 / 6.0)));
}

TEST_CASE("sample_ring is uniform over all subsets") {
  // K=2, P=4: each of the C(4,2)=6 subsets within 3 SE of 1/6
  auto stream = make_stream(11, 0, StreamKind::ring, 0);
  std::map<std::pair<uint32_t, uint32_t>, int> counts;
  const int draws = 60000;
  for (int rep = 0; rep < draws; ++rep) {
    const auto ring = sample_ring(2, 4, stream);
    ++counts[{ring[0], ring[1]}];
  }
  REQUIRE(counts.size() == 6);
  const double expected = draws / 6.0;
  const double se = std::sqrt(draws * (1.0 / 6.0) * (5.0 / 6.0));
  for (const auto& [subset, count] : counts) CHECK(std::abs(count - expected) < 3.0 * se);
}

TEST_CASE("sample_ring complement path covers K close to P") {
  // K = P-1: uniform over the P complements
  auto stream = make_stream(13, 0, StreamKind::ring, 0);
  std::vector<int> missing_counts(7, 0);
  const int draws = 70000;
  for (int rep = 0; rep < draws; ++rep) {
    const auto ring = sample_ring(6, 7, stream);
    REQUIRE(ring.size() == 6);
    uint32_t missing = 21;  // sum 0..6
    for (uint32_t key : ring) missing -= key;
    ++missing_counts[missing];
  }
  const double expected = draws / 7.0;
  const double se = std::sqrt(draws * (1.0 / 7.0) * (6.0 / 7.0));
  for (int c : missing_counts) CHECK(std::abs(c - expected) < 3.0 * se);
}

TEST_CASE("build_graph saturated scheme yields the complete graph") {
  const auto g = build_graph(6, scheme({1.0}, {3}, 4), {3, 0});
  CHECK(g.edges.size() == 15);
  for (uint32_t x = 0; x < 6; ++x) CHECK(g.ring(x).size() == 3);
}

TEST_CASE("build_graph is a pure function of the seed") {
  const auto params = scheme({0.5, 0.5}, {2, 4}, 50);
  const auto a = build_graph(40, params, {77, 5});
  const auto b = build_graph(40, params, {77, 5});
  CHECK(a.classes == b.classes);
  CHECK(a.ring_keys == b.ring_keys);
  CHECK(a.edges == b.edges);
  const auto c = build_graph(40, params, {77, 6});
  CHECK(a.ring_keys != c.ring_keys);
}

TEST_CASE("edge construction agrees with the pairwise oracle") {
  const std::vector<SchemeParams> schemes = {
      scheme({1.0}, {2}, 5),            // dense: P < n
      scheme({0.5, 0.5}, {1, 2}, 4),    // dense, heterogeneous
      scheme({0.5, 0.5}, {2, 5}, 100),  // sparse key-index path
      scheme({1.0}, {3}, 1000000),      // sorted-grouping path (huge pool)
  };
  uint64_t seed = 0;
  for (const auto& params : schemes) {
    for (int rep = 0; rep < 25; ++rep) {
      const uint32_t n = 1 + static_cast<uint32_t>((seed * 13) % 50);
      const auto g = build_graph(n, params, {seed, 0});
      CHECK(g.edges == oracles::edges_pairwise_enum(g));
      ++seed;
    }
  }
}

TEST_CASE("two-node edge frequency matches the exact edge probability") {
  struct Case {
    SchemeParams params;
    std::size_t i, j;
  };
  const std::vector<Case> cases = {
      {scheme({1.0}, {2}, 5), 0, 0},
      {scheme({0.5, 0.5}, {1, 2}, 4), 0, 0},
      {scheme({0.5, 0.5}, {1, 2}, 4), 0, 1},
      {scheme({0.5, 0.5}, {1, 2}, 4), 1, 1},
  };
  const int pairs = 100000;
  for (const auto& [params, i, j] : cases) {
    uint64_t hits = 0;
    for (int t = 0; t < pairs; ++t) {
      auto sa = make_stream(2024, t, StreamKind::pair, 0);
      auto sb = make_stream(2024, t, StreamKind::pair, 1);
      const auto ra = sample_ring(params.ring_size(i), params.pool_size, sa);
      const auto rb = sample_ring(params.ring_size(j), params.pool_size, sb);
      if (intersects(ra, rb)) ++hits;
    }
    const double p = edge_prob(i, j, params);
    const double se = std::sqrt(p * (1.0 - p) / pairs);
    CHECK(std::abs(static_cast<double>(hits) / pairs - p) < 3.0 * se);
  }
}

TEST_CASE("node degrees are exchangeable") {
  // marginal degree distribution of the first and last node agree
  const auto params = scheme({0.5, 0.5}, {1, 3}, 30);
  const uint32_t n = 12;
  const int trials = 20000;
  std::vector<double> first(n, 0.0), last(n, 0.0);
  for (int t = 0; t < trials; ++t) {
    const auto g = build_graph(n, params, {31337, static_cast<uint64_t>(t)});
    std::vector<uint32_t> degree(n, 0);
    for (const auto& [x, y] : g.edges) {
      ++degree[x];
      ++degree[y];
    }
    ++first[degree[0]];
    ++last[degree[n - 1]];
  }
  for (uint32_t d = 0; d < n; ++d) {
    const double pa = first[d] / trials;
    const double pb = last[d] / trials;
    const double se = std::sqrt((pa * (1 - pa) + pb * (1 - pb)) / trials + 1e-12);
    CHECK(std::abs(pa - pb) < 4.0 * se + 1e-9);
  }
}

TEST_CASE("graph dump format is stable") {
  const auto g = build_graph(3, scheme({1.0}, {1}, 3), {9, 0});
  std::ostringstream os;
  write_graph_dump(g, os);
  std::ostringstream expect;
  expect << "3 3 1\n";
  for (uint32_t x = 0; x < 3; ++x) expect << "1 " << g.ring(x)[0] << '\n';
  expect << "edges\n";
  for (const auto& [x, y] : g.edges) expect << x << ' ' << y << '\n';
  CHECK(os.str() == expect.str());
}
