#pragma once

#include <array>
#include <cstdint>

// Philox4x32-10 counter-based generator (Salmon et al., "Parallel random
// numbers: as easy as 1, 2, 3", SC'11). Chosen because substreams are
// addressed by plain integers: the 64-bit master seed is the key and the
// 128-bit counter carries (block, stream id, trial, purpose). Identical
// output on every platform and under any thread schedule.

namespace keygraph {

// Purpose tag baked into the counter so different uses of the same
// (trial, id) pair never draw from the same stream.
enum class StreamKind : uint32_t {
  classes = 1,
  ring = 2,
  capture = 3,
  pair = 4,
  generic = 5,
};

// Fully determines one sampled graph together with (n, params).
struct SeedSpec {
  uint64_t master_seed = 0;
  uint64_t trial_index = 0;
};

class Philox4x32 {
 public:
  Philox4x32(uint64_t key, uint32_t purpose, uint32_t trial, uint32_t id)
      : key_{static_cast<uint32_t>(key), static_cast<uint32_t>(key >> 32)},
        base_{0, id, trial, purpose} {}

  static std::array<uint32_t, 4> block(std::array<uint32_t, 4> ctr,
                                       std::array<uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
      const uint64_t prod0 = uint64_t{0xD2511F53u} * ctr[0];
      const uint64_t prod1 = uint64_t{0xCD9E8D57u} * ctr[2];
      ctr = {static_cast<uint32_t>(prod1 >> 32) ^ ctr[1] ^ key[0],
             static_cast<uint32_t>(prod1),
             static_cast<uint32_t>(prod0 >> 32) ^ ctr[3] ^ key[1],
             static_cast<uint32_t>(prod0)};
      key[0] += 0x9E3779B9u;
      key[1] += 0xBB67AE85u;
    }
    return ctr;
  }

  uint32_t next_u32() {
    if (pos_ == 4) {
      auto ctr = base_;
      ctr[0] = block_index_++;
      buffer_ = block(ctr, key_);
      pos_ = 0;
    }
    return buffer_[pos_++];
  }

  uint64_t next_u64() {
    const uint64_t lo = next_u32();
    const uint64_t hi = next_u32();
    return (hi << 32) | lo;
  }

  // Uniform double in [0, 1) from the top 53 bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Unbiased uniform integer in [0, bound) by rejecting the short cycle.
  uint64_t uniform_index(uint64_t bound) {
    const uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
    for (;;) {
      const uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

 private:
  std::array<uint32_t, 2> key_;
  std::array<uint32_t, 4> base_;
  std::array<uint32_t, 4> buffer_{};
  uint32_t block_index_ = 0;
  int pos_ = 4;
};

inline Philox4x32 make_stream(uint64_t master_seed, uint64_t trial, StreamKind kind,
                              uint32_t id = 0) {
  return Philox4x32(master_seed, static_cast<uint32_t>(kind),
                    static_cast<uint32_t>(trial), id);
}

inline Philox4x32 make_stream(const SeedSpec& seed, StreamKind kind, uint32_t id = 0) {
  return make_stream(seed.master_seed, seed.trial_index, kind, id);
}

}  // namespace keygraph
