#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hetsleep {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seedable random source built on std::mt19937_64. The standard library
// distributions are not bit-stable across implementations, so every variate
// is derived from raw uniform bits here.
//
// Stream splitting: substream k of seed s is an independent generator seeded
// with splitmix64(splitmix64(s) ^ splitmix64(k + 1)). Workers that consume
// disjoint substreams produce the same output regardless of scheduling.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    static Rng substream(std::uint64_t seed, std::uint64_t stream) {
        return Rng(splitmix64(splitmix64(seed) ^ splitmix64(stream + 1)));
    }

    // Uniform on [0, 1), 53-bit resolution.
    double u01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

    // Unit-mean exponential.
    double exp1() { return -std::log1p(-u01()); }

    std::uint64_t poisson(double mean);

private:
    std::mt19937_64 eng_;
};

inline std::uint64_t Rng::poisson(double mean) {
    if (!(mean > 0.0)) return 0;
    if (mean < 10.0) {
        // Inversion by sequential search.
        double p = std::exp(-mean);
        double cdf = p;
        const double u = u01();
        std::uint64_t k = 0;
        while (u > cdf && k < 1000) {
            ++k;
            p *= mean / static_cast<double>(k);
            cdf += p;
        }
        return k;
    }
    // Hormann's PTRS transformed-rejection sampler.
    const double log_mean = std::log(mean);
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        double u = u01() - 0.5;
        double v = u01();
        double us = 0.5 - std::fabs(u);
        double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
            kf * log_mean - mean - std::lgamma(kf + 1.0)) {
            return static_cast<std::uint64_t>(kf);
        }
    }
}

}  // namespace hetsleep
