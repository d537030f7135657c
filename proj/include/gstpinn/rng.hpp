/**
 * @file rng.hpp
 * @brief Seeded RNG with an explicit bit-stable double conversion.
 *
 * std::mt19937_64 output is pinned by the standard, but distribution objects
 * are not; converting to doubles by hand keeps sampled streams byte-identical
 * across standard libraries.
 */
#pragma once

#include <cstdint>
#include <random>

namespace gstpinn {

class DetRng {
public:
    explicit DetRng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t raw() { return gen_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

    /// Uniform in the open interval (lo, hi): resamples the measure-zero edge.
    double uniform_open(double lo, double hi) {
        double v;
        do {
            v = lo + uniform() * (hi - lo);
        } while (v == lo);
        return v;
    }

    /// Uniform integer in [0, n) without modulo bias.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = gen_();
        } while (v >= limit);
        return v % n;
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace gstpinn
