// Replicate-keyed RNG provenance. Every Monte Carlo draw is a pure function of
// (seed, stream index): stream s gets its own mt19937_64 seeded through two
// splitmix64 rounds, so nearby (seed, s) pairs land far apart in state space.
// A fresh engine+distribution per stream means the result sequence cannot leak
// state across replicates or depend on thread schedule.
#pragma once

#include <cstdint>
#include <random>

namespace lastexit {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = splitmix64(splitmix64(seed) ^ (0x9E3779B97F4A7C15ULL * (stream + 1)));
    return std::mt19937_64(s);
}

}  // namespace lastexit
