#pragma once

#include <cstdint>

namespace cmjp {

// Reproducible uniform variates. Each (seed, stream) pair owns an independent
// xoshiro256** state initialised through SplitMix64, so streams can be handed
// out one per path and replayed in any order.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 random bits.
  double uniform();

  // Uniform on (0, 1]; safe to take the logarithm of.
  double uniform_pos() { return 1.0 - uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t s_[4];
};

std::uint64_t splitmix64(std::uint64_t& state);

// Mixes two words into a fresh seed (used to derive per-replication seeds).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace cmjp
