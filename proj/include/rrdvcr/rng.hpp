#pragma once

#include <cstdint>
#include <random>

namespace rrdvcr {

using Rng = std::mt19937_64;

/// Independent, reproducible stream `stream` derived from a run seed.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x9e3779b9u};
  return Rng{seq};
}

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>{lo, hi}(rng);
}

inline bool bernoulli(Rng& rng, double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return std::bernoulli_distribution{p}(rng);
}

// Stream ids used by the simulator; keep stable, traces depend on them.
namespace streams {
inline constexpr std::uint64_t kDeployment = 1;
inline constexpr std::uint64_t kChannel = 2;
inline constexpr std::uint64_t kSources = 3;
inline constexpr std::uint64_t kFailures = 4;
inline constexpr std::uint64_t kMacBase = 1000; // + node id
} // namespace streams

} // namespace rrdvcr
