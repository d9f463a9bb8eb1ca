#pragma once

#include <cstdint>
#include <limits>

namespace gcpd {

/// xoshiro256** seeded through SplitMix64 from a (seed, stream) pair.
///
/// Child streams are derived by hashing the parent's identity with a child
/// index, so a tree of generators can be built without sharing state. The
/// generator satisfies UniformRandomBitGenerator and can drive the standard
/// <random> distributions.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  /// Independent generator for sub-task `index`. Does not advance *this.
  Rng child(std::uint64_t index) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t s_[4];
};

}  // namespace gcpd
