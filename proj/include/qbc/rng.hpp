#pragma once

#include <cstdint>
#include <random>

namespace qbc {

// splitmix64 finalizer; the mixing step behind all stream derivation.
inline std::uint64_t mix_u64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Stable sub-seed for (seed, index); used for per-trial and per-grid-point
// stream derivation.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return mix_u64(mix_u64(seed) ^ mix_u64(index + 0x9e3779b97f4a7c15ull));
}

// Counter-addressable random stream. Every stochastic operation takes one of
// these explicitly; a trial at index i always derives the same stream from
// (seed, i) no matter which worker thread runs it, so parallel runs are
// bit-for-bit reproducible.
class rng_stream {
public:
    explicit rng_stream(std::uint64_t seed) : engine_(mix_u64(seed)) {}

    static rng_stream derive(std::uint64_t seed, std::uint64_t index) {
        return rng_stream(derive_seed(seed, index));
    }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform double in [0, 1) with 53 random bits. Hand-rolled instead of
    // std::uniform_real_distribution, whose output is implementation-defined.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Unbiased integer in [0, bound). bound must be >= 1.
    std::uint64_t uniform_int(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t x = engine_();
            if (x >= threshold) return x % bound;
        }
    }

    int bit() { return static_cast<int>(uniform_int(2)); }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

}  // namespace qbc
