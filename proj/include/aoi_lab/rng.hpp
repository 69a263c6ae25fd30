#pragma once

// Random streams for the simulator.
//
// Each episode owns a std::mt19937_64 (bit-exact across standard libraries)
// seeded from a SplitMix64-derived value. Uniforms take the top 53 bits of a
// draw; exponentials are produced by inverse CDF, one uniform per draw. The
// std:: distributions are avoided because their output is library-specific.

#include <cmath>
#include <cstdint>
#include <random>

namespace aoi {

/// SplitMix64 finaliser.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed of replication `index`: the (index+1)'th output of a SplitMix64
/// stream started at `base_seed`.
constexpr std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t index) {
  return splitmix64_mix(base_seed + (index + 1) * 0x9E3779B97F4A7C15ULL);
}

/// Independent base seed for a named sub-experiment (a table cell, a sweep point).
constexpr std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t tag) {
  return splitmix64_mix(base_seed ^ splitmix64_mix(tag + 0x632BE59BD9B4E019ULL));
}

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Exponential with the given rate.
  double exponential(double rate) { return -std::log(1.0 - uniform()) / rate; }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace aoi
