// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

/// Counter-based random numbers: SplitMix64 applied to (seed, stream, counter).
///
///   key   = splitmix64(seed ^ splitmix64(stream))
///   bits  = splitmix64(key + counter * 0x9E3779B97F4A7C15)
///   u     = ((bits >> 11) + 0.5) * 2^-53          in (0, 1)
///
/// Every draw is a pure function of its coordinates, so parallel consumers
/// reproduce serial output exactly.
namespace vbohm::rng {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

class CounterStream {
public:
  constexpr CounterStream(std::uint64_t seed, std::uint64_t stream)
      : key_(splitmix64(seed ^ splitmix64(stream))) {}

  constexpr std::uint64_t bits(std::uint64_t counter) const {
    return splitmix64(key_ + counter * 0x9E3779B97F4A7C15ull);
  }

  double uniform(std::uint64_t counter) const {
    return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Box-Muller (cosine branch) on draws 2i and 2i+1.
  double normal(std::uint64_t i) const {
    const double u1 = uniform(2 * i);
    const double u2 = uniform(2 * i + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

private:
  std::uint64_t key_;
};

} // namespace vbohm::rng
