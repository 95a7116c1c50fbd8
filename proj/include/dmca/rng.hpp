#pragma once

#include <cstddef>
#include <cstdint>

namespace dmca {

// Counter-based generator: the k-th output is the SplitMix64 finalizer applied
// to seed + k * 0x9E3779B97F4A7C15 (k = 1, 2, ...). Every derived quantity
// (bounded integers, uniform reals, normals) is computed with integer or
// IEEE-754 arithmetic defined here rather than through <random>
// distributions, whose algorithms differ between standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

  std::uint64_t next_u64();

  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t uniform_index(std::uint64_t bound);

  // Uniform real in [0, 1) with 53 random bits.
  double uniform01();

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard normal via Box-Muller; the spare variate is not cached so the
  // stream position depends only on the number of calls.
  double normal();

  double normal(double mean, double stdev) { return mean + stdev * normal(); }

  // Independent child stream keyed by `stream`; does not advance this one.
  Rng split(std::uint64_t stream) const;

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64_mix(std::uint64_t z);

}  // namespace dmca
