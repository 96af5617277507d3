#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>

namespace clusterflip {

using Rng = std::mt19937_64;

// SplitMix64 finalizer (Steele, Lea, Flood 2014). Used for seed derivation
// so that replica streams are stable across platforms and stdlib versions.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Stream seed for replica r: hash64(master, r). Documented contract: the
// same (master, r) pair always yields the same stream seed.
inline std::uint64_t hash64(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(splitmix64(master) ^ splitmix64(stream + 0x9e3779b97f4a7c15ULL));
}

inline Rng make_rng(std::uint64_t seed) { return Rng(splitmix64(seed)); }

inline Rng replica_rng(std::uint64_t master, std::uint64_t replica) {
    return Rng(hash64(master, replica));
}

// Uniform in [0, 1). Hand-rolled from raw 64-bit output so streams are
// bit-identical regardless of the stdlib's distribution implementation.
inline double runif01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double runif(Rng& rng, double a, double b) {
    return a + (b - a) * runif01(rng);
}

// Standard normal via the polar method, again stdlib-independent.
inline double rnorm(Rng& rng) {
    for (;;) {
        const double u = 2.0 * runif01(rng) - 1.0;
        const double v = 2.0 * runif01(rng) - 1.0;
        const double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) {
            return u * std::sqrt(-2.0 * std::log(s) / s);
        }
    }
}

inline bool rbernoulli(Rng& rng, double p) { return runif01(rng) < p; }

// Index in [0, n) with rejection to avoid modulo bias.
inline std::size_t rindex(Rng& rng, std::size_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return static_cast<std::size_t>(x % n);
}

}  // namespace clusterflip
