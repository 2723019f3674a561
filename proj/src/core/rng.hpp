#pragma once

#include <cstdint>

namespace rss_sentry {

// Deterministic, platform-independent RNG. xoshiro256++ seeded through
// splitmix64; Gaussian draws via Box-Muller with an explicit u64 -> (0,1]
// mapping so traces are bit-identical everywhere for a given seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    // Independent stream for a (seed, trial-index) pair; parallel trials
    // never share state.
    static Rng for_trial(std::uint64_t seed, std::uint64_t trial_index);

    std::uint64_t next_u64();

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform();
    // Uniform on [lo, hi).
    double uniform(double lo, double hi);

    // Standard normal deviate.
    double gaussian();

private:
    std::uint64_t s_[4];
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace rss_sentry
