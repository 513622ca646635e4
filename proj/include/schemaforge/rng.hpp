#pragma once

// Seeded random streams with deterministic substream derivation.
//
// One master 64-bit seed drives a whole experiment. Substreams for
// (generation, offspring) or (trial) are derived by splitmix64 finalizers
// over the label words, so trials can run on any number of threads in any
// order and still reproduce byte-identical results.

#include <cstdint>
#include <random>

namespace schemaforge {

/// splitmix64 finalizer; the standard 64-bit integer mixing function.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Substream seed for labels (a, b) under a master seed:
/// mix(mix(seed ^ mix(a+1)) ^ mix(b+1)). Distinct labels give independent
/// streams for every seed we care about.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    return mix64(mix64(master ^ mix64(a + 1)) ^ mix64(b + 1));
}

/// mt19937_64 core plus the handful of draw helpers the engines need.
/// uniform_index uses rejection, so every index is exactly equally likely;
/// none of the std <random> distributions are used because their algorithms
/// are implementation-defined.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on {0, ..., n-1}; n >= 1.
    std::uint64_t uniform_index(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("uniform_index: n must be >= 1");
        if (n == 1) return 0;
        const std::uint64_t limit = n * (~std::uint64_t{0} / n);
        std::uint64_t draw;
        do {
            draw = engine_();
        } while (draw >= limit);
        return draw % n;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) {
        if (p <= 0.0) return false;
        if (p >= 1.0) return true;
        return uniform01() < p;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace schemaforge
