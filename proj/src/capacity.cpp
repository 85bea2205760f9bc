#include "leo/capacity.hpp"

#include "leo/errors.hpp"
#include "leo/offload.hpp"

#include <cmath>

namespace leo {

namespace {

double occupancy_scale(double u_s, const NetworkConfig& cfg) {
    const double r = cfg.shell_radius();
    return u_s * r * r;
}

void check_args(double n, double u_s, double c) {
    if (!(n > 0.0) || !(u_s >= 0.0) || !(c > 0.0)) {
        throw DomainError("satellite-empty probability: requires n > 0, u_s >= 0, c > 0");
    }
}

// M(c, n, -z) summed directly; terms shrink geometrically once k > c when z <= n/2.
double kummer_negative_direct(double c, double n, double z, const QuadratureSpec& spec) {
    double term = 1.0;
    double sum = 1.0;
    double peak = 1.0;
    for (std::size_t k = 0; k < spec.series_max_terms; ++k) {
        const double kd = static_cast<double>(k);
        term *= -(c + kd) / (n + kd) * z / (kd + 1.0);
        sum += term;
        peak = std::max(peak, std::abs(term));
        if (std::abs(term) < spec.series_term_tol * std::abs(sum) && kd > c) {
            if (peak * 1e-16 > 1e-10 * std::abs(sum)) {
                throw NonConvergence("empty_prob_exact: cancellation in the direct series");
            }
            return sum;
        }
    }
    throw NonConvergence("empty_prob_exact: direct series hit the term cap");
}

// e^{-z} M(n - c, n, z) = sum_k Pois(k; z) (n-c)_k / (n)_k, all terms positive.
double kummer_transformed(double c, double n, double z, const QuadratureSpec& spec) {
    double weight = std::exp(-z);
    double ratio = 1.0;
    double sum = weight;
    for (std::size_t k = 0; k < spec.series_max_terms; ++k) {
        const double kd = static_cast<double>(k);
        weight *= z / (kd + 1.0);
        ratio *= (n - c + kd) / (n + kd);
        const double term = weight * ratio;
        sum += term;
        if (kd + 1.0 > z && term < spec.series_term_tol * sum) {
            return sum;
        }
    }
    throw NonConvergence("empty_prob_exact: transformed series hit the term cap");
}

// E[exp(-z X)], X ~ Beta(c, n - c), by quadrature in geometric pieces from
// the scale of the integrand's peak.
double beta_laplace_quadrature(double c, double n, double z, const QuadratureSpec& spec) {
    const double log_norm = std::lgamma(n) - std::lgamma(c) - std::lgamma(n - c);
    auto f = [&](double x) {
        return std::exp(log_norm + (c - 1.0) * std::log(x) + (n - c - 1.0) * std::log1p(-x) - z * x);
    };
    const double scale = c / (n + z);
    double sum = integrate_finite(f, 0.0, std::min(1.0, scale), spec).value;
    for (double a = scale; a < 1.0 && a < 400.0 * scale; a *= 2.0) {
        sum += integrate_finite(f, a, std::min(1.0, 2.0 * a), spec).value;
    }
    return sum;
}

}  // namespace

EmptyProbApprox empty_prob_approx(double n, double u_s, const NetworkConfig& cfg, double c) {
    check_args(n, u_s, c);
    const double load = c * occupancy_scale(u_s, cfg);
    return {1.0 - load / n, n >= load};
}

double empty_prob_exact(double n, double u_s, const NetworkConfig& cfg, const QuadratureSpec& spec,
                        double c) {
    check_args(n, u_s, c);
    if (!(n > c)) {
        throw DomainError("empty_prob_exact: requires n > c");
    }
    const double z = occupancy_scale(u_s, cfg);
    if (z == 0.0) {
        return 1.0;
    }
    // The Kummer-transformed series needs about z + 8 sqrt(z) terms and
    // exp(-z) must stay representable.
    if (z + 8.0 * std::sqrt(z) + 20.0 < static_cast<double>(spec.series_max_terms) && z < 700.0) {
        return kummer_transformed(c, n, z, spec);
    }
    if (z <= 0.5 * n) {
        try {
            return kummer_negative_direct(c, n, z, spec);
        } catch (const NonConvergence&) {
        }
    }
    return beta_laplace_quadrature(c, n, z, spec);
}

double empty_prob_partial_sum(double n, double u_s, const NetworkConfig& cfg, std::size_t terms,
                              double c) {
    check_args(n, u_s, c);
    const double z = occupancy_scale(u_s, cfg);
    double term = 1.0;
    double sum = 0.0;
    for (std::size_t k = 0; k < terms; ++k) {
        sum += term;
        const double kd = static_cast<double>(k);
        term *= -(c + kd) / (n + kd) * z / (kd + 1.0);
    }
    return sum;
}

double empty_prob_third_term(double n, double u_s, const NetworkConfig& cfg, double c) {
    const double z = occupancy_scale(u_s, cfg);
    return z * z * c * (c + 1.0) / (2.0 * n * (n + 1.0));
}

double offloaded_intensity(const NetworkConfig& cfg, const ChannelState& cs, const QuadratureSpec& spec) {
    if (cfg.u_intensity == 0.0) {
        return 0.0;
    }
    return offload_probability(cfg, cs, spec).p_s * cfg.u_intensity;
}

EmptyProbResult empty_probability(double n, double u_s, const NetworkConfig& cfg,
                                  const QuadratureSpec& spec, double c) {
    const auto approx = empty_prob_approx(n, u_s, cfg, c);
    return {approx.value, empty_prob_exact(n, u_s, cfg, spec, c), u_s, approx.valid_regime};
}

}  // namespace leo
