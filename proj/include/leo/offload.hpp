#pragma once

#include "leo/channel.hpp"
#include "leo/geometry.hpp"
#include "leo/numerics.hpp"

namespace leo {

struct OffloadResult {
    double p_s = 0.0;
    double est_error = 0.0;
    NumericDiagnostics diagnostics;
};

// Normalised fading ratio g = |h_s|^2 / (2 sigma^2 |h_b|^2). Its law does not
// depend on sigma, and the bulk of its mass sits at g = O(1).

/// Density of the normalised fading ratio at g >= 0.
double normalized_ratio_pdf(double g, const ChannelState& cs, const QuadratureSpec& spec,
                            NumericDiagnostics* diag = nullptr);

/// CDF of the normalised fading ratio at g >= 0.
double normalized_ratio_cdf(double g, const ChannelState& cs, const QuadratureSpec& spec,
                            NumericDiagnostics* diag = nullptr);

/// Density of |h_s|^2 / |h_b|^2:
/// 2 sigma^2 [P_f Q(h) + (1 - P_f) e^-K sum_z z K^(2z-1) (2 sigma^2 h)^(z-1) / ((z-1)! (2 sigma^2 h K + 1)^(z+1))].
double fading_ratio_pdf(double h, const ChannelState& cs, const RayleighParams& rp,
                        const QuadratureSpec& spec);

/// CDF of |h_s|^2 / |h_b|^2.
double fading_ratio_cdf(double h, const ChannelState& cs, const RayleighParams& rp,
                        const QuadratureSpec& spec);

/// Probability that the nearest satellite delivers at least the received
/// power of the nearest base station:
///   P_s = int_0^inf F_ratio((P_s/P_b) h) f_fading(h) dh,
/// integrated in the normalised variable g = 2 sigma^2 h.
OffloadResult offload_probability(const NetworkConfig& cfg, const ChannelState& cs,
                                  const QuadratureSpec& spec);

}  // namespace leo
