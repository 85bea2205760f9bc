#pragma once

#include "leo/numerics.hpp"
#include "leo/random.hpp"

#include <cmath>
#include <utility>
#include <vector>

namespace leo {

/// Elevation-dependent parameters of the two-state satellite channel.
struct ChannelState {
    double t = 0.0;         ///< pass time [s]
    double p_f = 0.0;       ///< bad-state (shadowed) probability
    double k = 1.0;         ///< Rice factor of the good state
    double mu_db = 0.0;     ///< mean shadowing power level [dB]
    double sigma_db = 0.0;  ///< shadowing standard deviation [dB]

    void validate() const;
};

/// Terrestrial Rayleigh channel; the fading power has mean 2 sigma^2.
struct RayleighParams {
    double sigma = 4.47e-7;

    void validate() const;
    double mean_power() const { return 2.0 * sigma * sigma; }
};

enum class InterpolationMode { ExactMatchOnly, Linear };

/// Channel states keyed by strictly increasing pass time. Immutable.
class ChannelTimeline {
public:
    ChannelTimeline(std::vector<ChannelState> states,
                    InterpolationMode mode = InterpolationMode::ExactMatchOnly);

    const std::vector<ChannelState>& states() const& { return states_; }
    std::vector<ChannelState> states() && { return std::move(states_); }
    InterpolationMode mode() const { return mode_; }

    ChannelTimeline with_mode(InterpolationMode mode) const { return ChannelTimeline(states_, mode); }

private:
    std::vector<ChannelState> states_;
    InterpolationMode mode_;
};

/// The six-row 500 km pass (t = 0 ... 130 s), exact-match mode.
ChannelTimeline default_timeline();

/// Exact mode returns the listed row (NoExactMatch otherwise); linear mode
/// interpolates P_f, K, mu and sigma componentwise (OutOfRange outside the
/// listed span).
ChannelState timeline_lookup(const ChannelTimeline& timeline, double t);

/// E[g(h0)] over the dB-lognormal shadowing level h0 = 10^(X/10),
/// X ~ N(mu_db, sigma_db^2).
///
/// Gauss-Hermite in y = (X - mu)/(sqrt(2) sigma); below 0.3 dB the
/// standardised Gaussian integral is done adaptively instead.
double shadowing_expectation(const ChannelState& cs, const RealFunction& g, const QuadratureSpec& spec);

/// Density of the satellite fading power |h_s|^2: a Rician good state mixed
/// with an exponential-lognormal (Suzuki) bad state.
double sat_power_pdf(double h, const ChannelState& cs, const QuadratureSpec& spec);

/// CDF of |h_s|^2. The good state is summed as a Poisson mixture of Erlang
/// CDFs, the bad state as E[1 - exp(-h/h0)].
double sat_power_cdf(double h, const ChannelState& cs, const QuadratureSpec& spec);

/// 1 - exp(-h / (2 sigma^2)).
double bs_power_cdf(double h, const RayleighParams& rp);

/// Exact draw of |h_s|^2.
///
/// Good state: ((Z1 + sqrt(2K))^2 + Z2^2) / (2K), a scaled noncentral
/// chi-square with two degrees of freedom. Bad state: exponential with mean
/// h0, h0 dB-lognormal.
template <UnitStream Rng>
double sample_sat_power(const ChannelState& cs, Rng& rng) {
    if (rng.uniform() < cs.p_f) {
        const double h0 = std::pow(10.0, (cs.mu_db + cs.sigma_db * rng.normal()) / 10.0);
        return -h0 * std::log(rng.uniform());
    }
    const double z1 = rng.normal() + std::sqrt(2.0 * cs.k);
    const double z2 = rng.normal();
    return (z1 * z1 + z2 * z2) / (2.0 * cs.k);
}

/// Inverse-CDF draw of |h_b|^2.
template <UnitStream Rng>
double sample_bs_power(const RayleighParams& rp, Rng& rng) {
    return -rp.mean_power() * std::log(rng.uniform());
}

}  // namespace leo
