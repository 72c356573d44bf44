#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "keygraph/model.hpp"

// Closed-form probabilities, expectations and bounds of the inhomogeneous
// random key graph. Every binomial-coefficient ratio is evaluated through
// its product form in log domain, so pool sizes up to 1e7 are handled
// without overflow and tiny probabilities keep full relative precision.

namespace keygraph {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log of C(P-hole, ring) / C(P, ring): the probability that a uniformly
// random ring-subset of the pool avoids a fixed set of `hole` keys.
// Evaluated as sum_{l=0}^{m-1} log1p(-M/(P-l)) with m = min(hole, ring),
// M = max(hole, ring); the two orderings are the same ratio, and always
// using the smaller count makes the result exactly symmetric.
// Returns -inf when hole + ring > P (the sets must then intersect).
inline double log_avoid_prob(uint64_t hole, uint64_t ring, uint64_t pool) {
  if (ring >= pool) throw validation_error("log_avoid_prob: ring size must be below pool size");
  if (hole + ring > pool) return kNegInf;
  const uint64_t m = hole < ring ? hole : ring;
  const uint64_t big = hole < ring ? ring : hole;
  double acc = 0.0;
  for (uint64_t l = 0; l < m; ++l)
    acc += std::log1p(-static_cast<double>(big) / static_cast<double>(pool - l));
  return acc;
}

// log of C(P-Ki, Kj) / C(P, Kj): log probability that two independent
// uniform rings of sizes Ki and Kj share no key.
inline double log_no_overlap_prob(uint32_t ki, uint32_t kj, uint64_t pool) {
  if (ki < 1 || kj < 1) throw validation_error("log_no_overlap_prob: ring sizes must be at least 1");
  if (ki >= pool || kj >= pool)
    throw validation_error("log_no_overlap_prob: ring sizes must be below pool size");
  return log_avoid_prob(ki, kj, pool);
}

namespace detail {

inline void check_class_index(std::size_t i, const SchemeParams& params) {
  if (i >= params.num_classes()) throw validation_error("class index out of range");
}

inline double edge_prob_sizes(uint32_t ki, uint32_t kj, uint64_t pool) {
  return -std::expm1(log_no_overlap_prob(ki, kj, pool));
}

}  // namespace detail

// p_ij: probability that a class-i node and a class-j node are adjacent,
// i.e. the complement of the no-overlap probability of their rings.
// Saturates to exactly 1 when K_i + K_j > P.
inline double edge_prob(std::size_t i, std::size_t j, const SchemeParams& params) {
  detail::check_class_index(i, params);
  detail::check_class_index(j, params);
  return detail::edge_prob_sizes(params.ring_size(i), params.ring_size(j), params.pool_size);
}

inline bool edge_prob_saturated(const SchemeParams& params) {
  const std::size_t r = params.num_classes();
  return 2ull * params.ring_size(r - 1) > params.pool_size;
}

// Symmetric r x r matrix of p_ij, nondecreasing along rows and columns.
struct EdgeProbMatrix {
  std::size_t classes = 0;
  std::vector<double> values;  // row-major

  double operator()(std::size_t i, std::size_t j) const { return values[i * classes + j]; }
};

inline EdgeProbMatrix edge_prob_matrix(const SchemeParams& params) {
  const std::size_t r = params.num_classes();
  EdgeProbMatrix m;
  m.classes = r;
  m.values.assign(r * r, 0.0);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = i; j < r; ++j) {
      const double p = edge_prob(i, j, params);
      m.values[i * r + j] = p;
      m.values[j * r + i] = p;
    }
  return m;
}

// lambda_i: mean probability of an edge between a class-i node and a node
// of random class; (n-1)*lambda_i is the mean degree of a class-i node.
inline double mean_edge_prob(std::size_t i, const SchemeParams& params) {
  detail::check_class_index(i, params);
  double lambda = 0.0;
  for (std::size_t j = 0; j < params.num_classes(); ++j)
    lambda += params.mix.mu[j] * edge_prob(i, j, params);
  return lambda;
}

inline std::vector<double> mean_edge_probs(const SchemeParams& params) {
  std::vector<double> lambda(params.num_classes());
  for (std::size_t i = 0; i < lambda.size(); ++i) lambda[i] = mean_edge_prob(i, params);
  return lambda;
}

// First-order approximant K_i*K_j/P of p_ij, accurate when it is small.
inline double edge_prob_approx(std::size_t i, std::size_t j, const SchemeParams& params) {
  detail::check_class_index(i, params);
  detail::check_class_index(j, params);
  return static_cast<double>(params.ring_size(i)) * static_cast<double>(params.ring_size(j)) /
         static_cast<double>(params.pool_size);
}

// 1 - exp(-K_i*K_j/P), a guaranteed lower bound on p_ij.
inline double edge_prob_lower_bound(std::size_t i, std::size_t j, const SchemeParams& params) {
  return -std::expm1(-edge_prob_approx(i, j, params));
}

// C(P - ceil(a*Ki), Kj) / C(P, Kj) for a >= 1; zero when the enlarged hole
// leaves no room. Bounded above by the no-overlap probability raised to a.
inline double scaled_avoid_prob(double a, uint32_t ki, uint32_t kj, uint64_t pool) {
  if (!(a >= 1.0)) throw validation_error("scaled_avoid_prob: exponent must be at least 1");
  if (ki < 1 || kj < 1 || ki >= pool || kj >= pool)
    throw validation_error("scaled_avoid_prob: ring sizes out of range");
  const uint64_t hole = static_cast<uint64_t>(std::ceil(a * static_cast<double>(ki)));
  const double lg = log_avoid_prob(hole, kj, pool);
  return lg == kNegInf ? 0.0 : std::exp(lg);
}

// Psi(x) = -x - log(1-x), the remainder of the first-order expansion of
// log(1-x); Psi(x)/x^2 -> 1/2 as x -> 0.
inline double psi(double x) {
  if (!(x >= 0.0) || x >= 1.0) throw validation_error("psi: argument must lie in [0, 1)");
  return -x - std::log1p(-x);
}

namespace detail {

// log(1 - lambda_i), computed from whichever side keeps precision:
// small lambda via log1p of the expm1-accumulated lambda, large lambda via
// the directly accumulated survival sum.
inline double log_one_minus_lambda(std::size_t i, const SchemeParams& params) {
  const double lambda = mean_edge_prob(i, params);
  if (lambda <= 0.5) return std::log1p(-lambda);
  double survive = 0.0;
  for (std::size_t j = 0; j < params.num_classes(); ++j) {
    const double lg =
        log_no_overlap_prob(params.ring_size(i), params.ring_size(j), params.pool_size);
    if (lg != kNegInf) survive += params.mix.mu[j] * std::exp(lg);
  }
  return survive > 0.0 ? std::log(survive) : kNegInf;
}

inline double power_one_minus_lambda(std::size_t i, uint64_t exponent,
                                     const SchemeParams& params) {
  if (exponent == 0) return 1.0;
  const double lg = log_one_minus_lambda(i, params);
  return lg == kNegInf ? 0.0 : std::exp(static_cast<double>(exponent) * lg);
}

}  // namespace detail

// E[I_n] = n * sum_i mu_i (1 - lambda_i)^(n-1): expected number of
// isolated nodes among n.
inline double expected_isolated(uint64_t n, const SchemeParams& params) {
  if (n == 0) throw validation_error("expected_isolated: n must be at least 1");
  double acc = 0.0;
  for (std::size_t i = 0; i < params.num_classes(); ++i)
    acc += params.mix.mu[i] * detail::power_one_minus_lambda(i, n - 1, params);
  return static_cast<double>(n) * acc;
}

// E[Y_n] = n * mu_1 (1 - lambda_1)^(n-1): expected number of isolated
// class-1 nodes (the class with the smallest rings).
inline double expected_class1_isolated(uint64_t n, const SchemeParams& params) {
  if (n == 0) throw validation_error("expected_class1_isolated: n must be at least 1");
  return static_cast<double>(n) * params.mix.mu[0] *
         detail::power_one_minus_lambda(0, n - 1, params);
}

// Probability that two given nodes are both class-1 and both isolated:
//   mu_1^2 * C(P-K1,K1)/C(P,K1) * (sum_j mu_j C(P-2K1,Kj)/C(P,Kj))^(n-2).
inline double pair_class1_isolated_prob(uint64_t n, const SchemeParams& params) {
  if (n < 2) throw validation_error("pair_class1_isolated_prob: n must be at least 2");
  const uint32_t k1 = params.ring_size(0);
  const double log_disjoint = log_avoid_prob(k1, k1, params.pool_size);
  if (log_disjoint == kNegInf) return 0.0;
  double inner = 0.0;
  for (std::size_t j = 0; j < params.num_classes(); ++j) {
    const double lg = log_avoid_prob(2ull * k1, params.ring_size(j), params.pool_size);
    if (lg != kNegInf) inner += params.mix.mu[j] * std::exp(lg);
  }
  const double mu1 = params.mix.mu[0];
  return mu1 * mu1 * std::exp(log_disjoint) *
         std::pow(inner, static_cast<double>(n - 2));
}

// E[chi_1 chi_2] / E[chi_1]^2 with chi_i the indicator that node i is
// class-1 and isolated. Evaluated in log domain so it stays finite for
// large n where both moments underflow.
inline double second_moment_ratio(uint64_t n, const SchemeParams& params) {
  if (n < 2) throw validation_error("second_moment_ratio: n must be at least 2");
  const double log_q1 = detail::log_one_minus_lambda(0, params);
  if (log_q1 == kNegInf)
    throw validation_error("second_moment_ratio: lambda_1 is exactly 1, per-node mean vanishes");

  const uint32_t k1 = params.ring_size(0);
  const double log_disjoint = log_avoid_prob(k1, k1, params.pool_size);
  if (log_disjoint == kNegInf) return 0.0;
  double inner = 0.0;
  for (std::size_t j = 0; j < params.num_classes(); ++j) {
    const double lg = log_avoid_prob(2ull * k1, params.ring_size(j), params.pool_size);
    if (lg != kNegInf) inner += params.mix.mu[j] * std::exp(lg);
  }
  if (inner == 0.0 && n > 2) return 0.0;

  const double log_pair =
      log_disjoint + (n > 2 ? static_cast<double>(n - 2) * std::log(inner) : 0.0);
  const double log_per_node_sq = 2.0 * static_cast<double>(n - 1) * log_q1;
  return std::exp(log_pair - log_per_node_sq);
}

struct WeightedValue {
  double value = 0.0;
  double prob = 0.0;
};

// Distribution of Z = C(P-K1, K)/C(P, K) where K is a mu-random ring size:
// the chance that a random node's ring avoids a fixed smallest ring.
inline std::vector<WeightedValue> avoidance_distribution(const SchemeParams& params) {
  std::vector<WeightedValue> dist(params.num_classes());
  const uint32_t k1 = params.ring_size(0);
  for (std::size_t j = 0; j < params.num_classes(); ++j) {
    const double lg = log_avoid_prob(k1, params.ring_size(j), params.pool_size);
    dist[j].value = lg == kNegInf ? 0.0 : std::exp(lg);
    dist[j].prob = params.mix.mu[j];
  }
  return dist;
}

// (1/4) p_1r^2: upper bound on the variance of the avoidance variable Z,
// from the range bound var(X) <= (max-min)^2/4.
inline double popoviciu_bound(const SchemeParams& params) {
  const double p1r = edge_prob(0, params.num_classes() - 1, params);
  return 0.25 * p1r * p1r;
}

// Expected fraction of the key pool covered by the union of `captured`
// independently sampled rings: 1 - (sum_j mu_j (1 - K_j/P))^captured.
inline double expected_pool_coverage(uint64_t captured, const SchemeParams& params) {
  if (captured == 0) return 0.0;
  double miss = 0.0;
  for (std::size_t j = 0; j < params.num_classes(); ++j)
    miss += params.mix.mu[j] *
            (1.0 - static_cast<double>(params.ring_size(j)) / static_cast<double>(params.pool_size));
  return -std::expm1(static_cast<double>(captured) * std::log(miss));
}

}  // namespace keygraph
