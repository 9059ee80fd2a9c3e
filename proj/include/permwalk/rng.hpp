#pragma once

// Per-replicate random streams. Replicate r of master seed s draws from a
// Mersenne Twister seeded by a SplitMix64 hash of (s, r), so results do not
// depend on how replicates are spread over workers.

#include <cstdint>
#include <random>

namespace permwalk {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replicate) {
  return splitmix64(splitmix64(master) ^ splitmix64(replicate + 0x632be59bd9b4e019ULL));
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t master, std::uint64_t replicate = 0) {
  return Engine(derive_seed(master, replicate));
}

/// Uniform integer in [0, n).
inline std::uint64_t uniform_below(Engine& rng, std::uint64_t n) {
  return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng);
}

} // namespace permwalk
