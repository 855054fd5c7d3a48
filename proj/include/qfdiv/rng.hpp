#pragma once

#include <cstdint>
#include <random>

namespace qfdiv {

// Default seed used by the CLI and the sampling harnesses.
inline constexpr std::uint64_t kDefaultSeed = 1234567891011ULL;

// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Derives the seed of sub-stream `k` from `seed`. Trial k of every harness
// draws from mix(seed, k), so results do not depend on worker scheduling.
constexpr std::uint64_t mix(std::uint64_t seed, std::uint64_t k) noexcept {
    return splitmix64(splitmix64(seed) ^ (k * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng{seed}; }

}  // namespace qfdiv
