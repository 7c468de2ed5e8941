#pragma once
// Seeded random streams. A run seed is split into named streams so that the
// draws consumed by one phase never shift another phase's draws.

#include <cstdint>
#include <random>
#include <string_view>

namespace mlsd {

using Rng = std::mt19937_64;

enum class Stream : std::uint64_t {
    Rounding = 1,
    Offsets = 2,
    PayoffNoise = 3,
    Instance = 4,
    Perturbation = 5,
    Sampling = 6,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline Rng make_stream(std::uint64_t seed, Stream stream) {
    return Rng(splitmix64(splitmix64(seed) ^ (static_cast<std::uint64_t>(stream) * 0xd1b54a32d192ed03ULL)));
}

/// Uniform double in [0,1) from the top 53 bits; identical across standard libraries.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, bound) by rejection; identical across standard libraries.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
    const std::uint64_t limit = bound == 0 ? 0 : (~std::uint64_t{0} - bound + 1) % bound;
    for (;;) {
        const std::uint64_t r = rng();
        if (r >= limit) return r % bound;
    }
}

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

}  // namespace mlsd
