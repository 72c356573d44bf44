#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace keygraph {

// Thrown when inputs violate the structural constraints of the scheme;
// the CLI maps it to exit code 2.
struct validation_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Class mixture: a node belongs to class j with probability mu[j] and then
// receives a key ring of ring_sizes[j] keys. Ring sizes are nondecreasing,
// all probabilities strictly positive and summing to one.
struct ClassMix {
  std::vector<double> mu;
  std::vector<uint32_t> ring_sizes;

  std::size_t num_classes() const { return mu.size(); }
};

// Full scheme parameters: the class mixture plus the key pool size P.
// Keys are identified by integers in [0, P). Immutable after validation,
// safe to share across threads.
struct SchemeParams {
  ClassMix mix;
  uint64_t pool_size = 0;

  std::size_t num_classes() const { return mix.num_classes(); }
  uint32_t ring_size(std::size_t cls) const { return mix.ring_sizes[cls]; }
};

namespace detail {

inline constexpr double kMixSumTolerance = 1e-12;

// Key ids are stored as 32-bit integers by the sampler.
inline constexpr uint64_t kMaxPoolSize = 0xFFFFFFFFull;

}  // namespace detail

// Validates raw inputs into a SchemeParams. Inputs must already satisfy the
// structural constraints; in particular a non-monotone ring-size vector is
// rejected, never silently reordered.
inline SchemeParams validate_scheme(std::size_t num_classes,
                                    std::span<const double> mu,
                                    std::span<const uint32_t> ring_sizes,
                                    uint64_t pool_size) {
  if (num_classes == 0) throw validation_error("scheme: class count must be at least 1");
  if (mu.size() != num_classes)
    throw validation_error("scheme: mu has " + std::to_string(mu.size()) +
                           " entries, expected " + std::to_string(num_classes));
  if (ring_sizes.size() != num_classes)
    throw validation_error("scheme: K has " + std::to_string(ring_sizes.size()) +
                           " entries, expected " + std::to_string(num_classes));

  double sum = 0.0;
  for (double m : mu) {
    if (!(m > 0.0)) throw validation_error("scheme: class probabilities must be positive");
    sum += m;
  }
  if (std::abs(sum - 1.0) > detail::kMixSumTolerance)
    throw validation_error("scheme: class probabilities must sum to 1 (got " +
                           std::to_string(sum) + ")");

  for (std::size_t j = 0; j < num_classes; ++j) {
    if (ring_sizes[j] < 1) throw validation_error("scheme: ring sizes must be at least 1");
    if (j > 0 && ring_sizes[j] < ring_sizes[j - 1])
      throw validation_error("scheme: ring sizes must be nondecreasing");
  }

  if (pool_size < 2) throw validation_error("scheme: pool size must be at least 2");
  if (pool_size > detail::kMaxPoolSize)
    throw validation_error("scheme: pool size exceeds supported maximum 2^32-1");
  if (ring_sizes[num_classes - 1] >= pool_size)
    throw validation_error("scheme: largest ring size must be strictly less than the pool size");

  SchemeParams params;
  params.mix.mu.assign(mu.begin(), mu.end());
  params.mix.ring_sizes.assign(ring_sizes.begin(), ring_sizes.end());
  params.pool_size = pool_size;
  return params;
}

inline SchemeParams validate_scheme(const std::vector<double>& mu,
                                    const std::vector<uint32_t>& ring_sizes,
                                    uint64_t pool_size) {
  return validate_scheme(mu.size(), std::span<const double>(mu),
                         std::span<const uint32_t>(ring_sizes), pool_size);
}

// Mean ring size: the expectation of the ring-size random variable that
// takes value K[j] with probability mu[j].
inline double ring_size_mean(const ClassMix& mix) {
  double mean = 0.0;
  for (std::size_t j = 0; j < mix.num_classes(); ++j) mean += mix.mu[j] * mix.ring_sizes[j];
  return mean;
}

inline double ring_size_variance(const ClassMix& mix) {
  const double mean = ring_size_mean(mix);
  double var = 0.0;
  for (std::size_t j = 0; j < mix.num_classes(); ++j) {
    const double d = mix.ring_sizes[j] - mean;
    var += mix.mu[j] * d * d;
  }
  return var;
}

}  // namespace keygraph
