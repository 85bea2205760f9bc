#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <numbers>
#include <random>

namespace leo {

/// Anything that yields uniform (0,1) and standard normal variates.
template <class R>
concept UnitStream = requires(R& r) {
    { r.uniform() } -> std::convertible_to<double>;
    { r.normal() } -> std::convertible_to<double>;
};

/// Reproducible random stream keyed by (seed, stream index).
///
/// The engine is std::mt19937_64 seeded through std::seed_seq, both fully
/// specified by the standard; the uniform and normal transforms are done here
/// rather than with <random> distributions so that output is identical across
/// standard library implementations.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream_index) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream_index),
                          static_cast<std::uint32_t>(stream_index >> 32), 0x9e3779b9u};
        engine_.seed(seq);
    }

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform() {
        const std::uint64_t bits = engine_() >> 11;
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal by Box-Muller; the second variate of each pair is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double radius = std::sqrt(-2.0 * std::log(uniform()));
        const double angle = 2.0 * std::numbers::pi * uniform();
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    /// Poisson variate by sequential inversion; large means are split into
    /// chunks so exp(-mean) never underflows.
    std::uint64_t poisson(double mean) {
        constexpr double kChunk = 500.0;
        std::uint64_t total = 0;
        while (mean > kChunk) {
            total += poisson_small(kChunk);
            mean -= kChunk;
        }
        return total + poisson_small(mean);
    }

private:
    std::uint64_t poisson_small(double mean) {
        if (mean <= 0.0) {
            return 0;
        }
        const double u = uniform();
        double p = std::exp(-mean);
        double cdf = p;
        std::uint64_t k = 0;
        while (u > cdf && p > 0.0) {
            ++k;
            p *= mean / static_cast<double>(k);
            cdf += p;
        }
        return k;
    }

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

static_assert(UnitStream<RandomStream>);

}  // namespace leo
