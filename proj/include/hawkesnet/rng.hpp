#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace hawkesnet {

// SplitMix64 finalizer (Steele, Lea, Flood 2014). Public and fixed so that
// seeds derived from it are reproducible across machines.
[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Folds a list of integer keys into one 64-bit seed. Order matters.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t seed,
                                            std::initializer_list<std::uint64_t> keys) noexcept {
    std::uint64_t h = splitmix64(seed);
    for (std::uint64_t key : keys) {
        h = splitmix64(h ^ splitmix64(key + 0x632be59bd9b4e019ULL));
    }
    return h;
}

// Thin wrapper over mt19937_64. All variate transforms are written out here
// instead of using <random> distributions, whose algorithms are
// implementation-defined; this keeps event streams identical across
// standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform on the open interval (0, 1).
    double uniform() noexcept {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    double exponential(double rate) noexcept { return -std::log(uniform()) / rate; }

    // Uniform integer in [0, n). n must be positive.
    std::uint64_t index(std::uint64_t n) noexcept {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x = engine_();
        while (x >= limit) {
            x = engine_();
        }
        return x % n;
    }

    // Poisson variate by multiplicative inversion; large means are split
    // into independent chunks so the product never underflows.
    std::uint64_t poisson(double mean) noexcept {
        constexpr double kChunk = 16.0;
        std::uint64_t total = 0;
        while (mean > 0.0) {
            const double part = mean > kChunk ? kChunk : mean;
            mean -= part;
            const double limit = std::exp(-part);
            double prod = uniform();
            while (prod > limit) {
                ++total;
                prod *= uniform();
            }
        }
        return total;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace hawkesnet
