#pragma once

#include <cstdint>
#include <random>

namespace optstop {

/// SplitMix64 finalizer. Used for seed derivation so that sub-streams are
/// decorrelated from the master seed and from each other.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Sub-seed for stream `index` of a master seed. Stable across platforms and
/// worker counts; every parallel batch derives per-run seeds through this.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master) ^ (index + 1) * 0xD1B54A32D192ED03ULL);
}

using RngEngine = std::mt19937_64;

inline RngEngine make_engine(std::uint64_t seed) { return RngEngine(splitmix64(seed)); }

/// Uniform double in [0, 1) built from the raw engine output. The standard
/// distributions are implementation-defined, so we keep draws portable.
inline double uniform01(RngEngine& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n), rejection-sampled from the raw 64-bit stream.
inline std::uint64_t uniform_index(RngEngine& rng, std::uint64_t n) {
    const std::uint64_t bound = n * (UINT64_MAX / n);
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= bound);
    return x % n;
}

}  // namespace optstop
