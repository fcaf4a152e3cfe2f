#pragma once

// Counter-based random numbers: every draw is a pure function of
// (seed, counters), so results do not depend on evaluation order or threads.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace specpert::rng {

// SplitMix64 finalizer (Stafford "Mix13").
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

// Hash of (key, a, b) with avalanche between every stage.
constexpr std::uint64_t hash3(std::uint64_t key, std::uint64_t a, std::uint64_t b) {
  std::uint64_t h = mix64(key + kGamma);
  h = mix64(h ^ (a + kGamma * 2));
  h = mix64(h ^ (b + kGamma * 3));
  return h;
}

// Uniform in the open interval (0, 1) from the top 53 bits.
constexpr double to_unit_open(std::uint64_t w) {
  return (static_cast<double>(w >> 11) + 0.5) * 0x1.0p-53;
}

// Two independent standard normals via Box-Muller.
inline std::pair<double, double> normal_pair(std::uint64_t w0, std::uint64_t w1) {
  const double r = std::sqrt(-2.0 * std::log(to_unit_open(w0)));
  const double angle = 2.0 * std::numbers::pi * to_unit_open(w1);
  return {r * std::cos(angle), r * std::sin(angle)};
}

/// Seed for trial `trial` of a run at size n, derived from the master seed.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t n, std::uint64_t trial) {
  return hash3(master ^ 0x747269616c736565ULL, n, trial);
}

}  // namespace specpert::rng
