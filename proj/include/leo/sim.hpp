#pragma once

#include "leo/capacity.hpp"
#include "leo/channel.hpp"
#include "leo/geometry.hpp"

#include <cstdint>

namespace leo {

struct SimConfig {
    std::uint64_t trials = 1'000'000;
    std::uint64_t seed = 1;
    SamplingMode mode = SamplingMode::InverseCdf;
    std::uint64_t batch_size = 65'536;
    unsigned threads = 0;  ///< 0 picks std::thread::hardware_concurrency()

    void validate() const;
};

struct SimEstimate {
    double estimate = 0.0;
    double std_error = 0.0;  ///< sqrt(p (1 - p) / trials)
    std::uint64_t trials = 0;
    double elapsed = 0.0;    ///< seconds, wall clock
};

/// Monte Carlo offloading probability. Each trial draws both nearest
/// distances and both fading powers and counts a satellite association when
/// P_s h_s R_s^-eta >= P_b h_b R_b^-eta (ties go to the satellite).
///
/// Batch i uses RandomStream(seed, i), so the result does not depend on the
/// thread count.
SimEstimate estimate_ps(const NetworkConfig& cfg, const ChannelState& cs, const SimConfig& sc);

/// Fraction of empty satellites. Each of sc.trials realizations places n
/// satellites uniformly on the sphere and a Poisson number of users with mean
/// c u_s (r_e+r_s)^2, assigns every user to its nearest satellite and counts
/// the satellites left without users. The reported trial count is
/// realizations * n, one Bernoulli per satellite.
SimEstimate estimate_empty_fraction(double n, double u_s, const NetworkConfig& cfg, const SimConfig& sc,
                                    double c = kVoronoiShape);

/// As above with n = cfg.n_sats and u_s = P_s * U.
SimEstimate estimate_empty_fraction(const NetworkConfig& cfg, const ChannelState& cs, const SimConfig& sc,
                                    const QuadratureSpec& spec);

}  // namespace leo
