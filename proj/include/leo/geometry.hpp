#pragma once

#include "leo/channel.hpp"
#include "leo/numerics.hpp"
#include "leo/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace leo {

/// Deployment and radio constants of the integrated network.
///
/// Distances in km, intensities per km^2, powers in W. One path-loss exponent
/// is shared by both tiers.
struct NetworkConfig {
    double r_e = 6378.0;        ///< Earth radius
    double r_s = 500.0;         ///< satellite altitude
    double n_sats = 1000.0;     ///< constellation size N (real-valued for the planner)
    double b_intensity = 0.3;   ///< base-station intensity B
    double u_intensity = 1.0;   ///< user intensity U
    double p_sat_tx = 8.0;      ///< satellite radiant power
    double p_bs_tx = 1.0;       ///< base-station radiant power
    double eta = 3.0;           ///< path-loss exponent
    double sigma = 4.47e-7;     ///< Rayleigh parameter of the terrestrial link

    /// Radius of the satellite shell, r_e + r_s.
    double shell_radius() const { return r_e + r_s; }
    RayleighParams rayleigh() const { return {sigma}; }

    /// All fields positive (p_sat_tx and u_intensity may be 0), eta > 2.
    void validate() const;
};

enum class SamplingMode { InverseCdf, Spatial };

/// Density of the distance from a surface user to the nearest of N satellites
/// placed uniformly on the shell. Support [r_s, 2 r_e + r_s].
double sat_nearest_pdf(double r, const NetworkConfig& cfg);

/// 1 - (1 - (r^2 - r_s^2) / (4 r_e (r_e + r_s)))^N.
double sat_nearest_cdf(double r, const NetworkConfig& cfg);

/// Nearest-satellite distance.
///
/// InverseCdf inverts sat_nearest_cdf in closed form. Spatial draws N points
/// uniformly on the shell and returns the smallest Euclidean distance to the
/// user at (0, 0, r_e).
template <UnitStream Rng>
double sample_sat_nearest(const NetworkConfig& cfg, Rng& rng, SamplingMode mode = SamplingMode::InverseCdf) {
    const double r_sh = cfg.shell_radius();
    if (mode == SamplingMode::InverseCdf) {
        // 1 - U^(1/N) for U uniform, computed without cancellation.
        const double cap_fraction = -std::expm1(std::log(rng.uniform()) / cfg.n_sats);
        const double r2 = cfg.r_s * cfg.r_s + 4.0 * cfg.r_e * r_sh * cap_fraction;
        return std::clamp(std::sqrt(r2), cfg.r_s, 2.0 * cfg.r_e + cfg.r_s);
    }
    const auto count = static_cast<long long>(std::llround(cfg.n_sats));
    double best = std::numeric_limits<double>::infinity();
    for (long long i = 0; i < count; ++i) {
        // Archimedes: z uniform on [-1, 1] and an independent azimuth.
        const double z = 2.0 * rng.uniform() - 1.0;
        const double phi = 2.0 * std::numbers::pi * rng.uniform();
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double dx = r_sh * rho * std::cos(phi);
        const double dy = r_sh * rho * std::sin(phi);
        const double dz = r_sh * z - cfg.r_e;
        best = std::min(best, std::sqrt(dx * dx + dy * dy + dz * dz));
    }
    return best;
}

/// 1 - exp(-B pi r^2): nearest base station of a planar PPP.
double bs_nearest_cdf(double r, const NetworkConfig& cfg);

template <UnitStream Rng>
double sample_bs_nearest(const NetworkConfig& cfg, Rng& rng) {
    return std::sqrt(-std::log(rng.uniform()) / (std::numbers::pi * cfg.b_intensity));
}

/// Exponents of the distance-ratio CDF at ratio r:
/// `shell_term` = pi B r_s^2 r^(-2/eta) and `cap_term` = 4 pi B r_e (r_e + r_s) r^(-2/eta).
struct RatioExponents {
    double shell_term;
    double cap_term;
};
RatioExponents ratio_exponents(double r, const NetworkConfig& cfg);

/// CDF of (R_s / R_b)^eta:
/// exp(-pi B r^(-2/eta) r_s^2) * kummer_ratio_series(N, 4 pi B r^(-2/eta) r_e (r_e + r_s)).
/// Defined as 0 at r = 0.
double dist_ratio_cdf(double r, const NetworkConfig& cfg, const QuadratureSpec& spec,
                      NumericDiagnostics* diag = nullptr);

}  // namespace leo
