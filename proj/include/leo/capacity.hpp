#pragma once

#include "leo/channel.hpp"
#include "leo/geometry.hpp"
#include "leo/numerics.hpp"

namespace leo {

/// Shape constant of the 2-D Voronoi cell-area law.
inline constexpr double kVoronoiShape = 3.6;

struct EmptyProbApprox {
    double value;       ///< 1 - c (r_e+r_s)^2 u_s / n, unclamped
    bool valid_regime;  ///< n >= c (r_e+r_s)^2 u_s
};

struct EmptyProbResult {
    double p_empty_approx = 1.0;
    double p_empty_exact = 1.0;
    double u_s = 0.0;
    bool valid_regime = true;
};

/// First-order satellite-empty probability. Outside the validity regime the
/// value is returned as computed (possibly negative) with the flag cleared.
EmptyProbApprox empty_prob_approx(double n, double u_s, const NetworkConfig& cfg,
                                  double c = kVoronoiShape);

/// Probability that a satellite cell holds no offloaded user when the scaled
/// cell area a/(r_e+r_s)^2 is Beta(c, n - c): the Kummer function
/// M(c, n, -u_s (r_e+r_s)^2).
///
/// Summed as a series when it fits the term cap, otherwise by quadrature of
/// the Beta integral. Throws DomainError for n <= c and NonConvergence when
/// the quadrature fails as well.
double empty_prob_exact(double n, double u_s, const NetworkConfig& cfg, const QuadratureSpec& spec,
                        double c = kVoronoiShape);

/// First `terms` terms of the alternating expansion sum_k (c)_k/(n)_k (-z)^k/k!,
/// z = u_s (r_e+r_s)^2. Two terms reproduce empty_prob_approx.
double empty_prob_partial_sum(double n, double u_s, const NetworkConfig& cfg, std::size_t terms,
                              double c = kVoronoiShape);

/// (r_e+r_s)^4 u_s^2 c (c+1) / (2 n (n+1)): bounds |exact - approx| in the regime.
double empty_prob_third_term(double n, double u_s, const NetworkConfig& cfg,
                             double c = kVoronoiShape);

/// U_s = P_s * U, with P_s from offload_probability.
double offloaded_intensity(const NetworkConfig& cfg, const ChannelState& cs, const QuadratureSpec& spec);

/// Both forms at once, for reporting.
EmptyProbResult empty_probability(double n, double u_s, const NetworkConfig& cfg,
                                  const QuadratureSpec& spec, double c = kVoronoiShape);

}  // namespace leo
