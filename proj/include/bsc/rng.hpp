#pragma once

#include <cstdint>
#include <random>

namespace bsc {

/// Seedable pseudo-random stream that can be split into independent child
/// streams by index. Children depend only on (seed, path), never on how
/// many numbers the parent has drawn, so trial i of a sweep sees the same
/// stream whatever thread or order runs it.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

  RngStream split(std::uint64_t index) const;

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via Box-Muller (implementation independent).
  double normal();
  std::uint64_t next_u64() { return engine_(); }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace bsc
