// rng.hpp - seed derivation for deterministic, order-independent streams.

#pragma once

#include <cstdint>
#include <random>

namespace pixelnav {

/// splitmix64 step; good avalanche, used only for seed derivation.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Derives an independent child seed from (seed, stream, index). Streams
/// keyed this way stay identical regardless of evaluation order.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0) {
  return splitmix64(splitmix64(seed ^ splitmix64(stream)) ^ index);
}

inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0) {
  return std::mt19937_64(derive_seed(seed, stream, index));
}

// Stream tags for the per-module RNG streams of an episode.
namespace rng_stream {
inline constexpr std::uint64_t kMppi = 0x6d707069;          // "mppi"
inline constexpr std::uint64_t kObstacles = 0x6f627374;     // "obst"
inline constexpr std::uint64_t kYaw = 0x79617765;           // "yawe"
inline constexpr std::uint64_t kLocalization = 0x6c6f6361;  // "loca"
}  // namespace rng_stream

}  // namespace pixelnav
