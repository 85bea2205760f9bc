#include "leo/offload.hpp"

#include "leo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace leo {

namespace {

// e^-K sum_{m>=0} c_m rho^m / m!, with c_m = m + 1 (density) or 1 (CDF).
// This is the I0 expansion of the Rician term after averaging over the
// exponential terrestrial fading.
double rician_series(double rho, double k, bool density, const QuadratureSpec& spec,
                     NumericDiagnostics* diag) {
    double term = std::exp(-k);
    if (term == 0.0) {
        throw DomainError("fading ratio: Rice factor too large for the series");
    }
    double sum = term;
    std::size_t used = 1;
    for (std::size_t m = 0;; ++m) {
        const double md = static_cast<double>(m);
        if (rho == 0.0) {
            break;
        }
        term *= rho / (md + 1.0);
        if (density) {
            term *= (md + 2.0) / (md + 1.0);
        }
        sum += term;
        ++used;
        if (md + 1.0 > rho && term < spec.series_term_tol * sum) {
            break;
        }
        if (used >= spec.series_max_terms) {
            throw NonConvergence("fading ratio: z-series hit the term cap");
        }
    }
    if (diag != nullptr) {
        diag->series_terms_used = std::max(diag->series_terms_used, used);
    }
    return sum;
}

}  // namespace

double normalized_ratio_pdf(double g, const ChannelState& cs, const QuadratureSpec& spec,
                            NumericDiagnostics* diag) {
    if (!(g >= 0.0)) {
        throw DomainError("fading ratio density: argument must be >= 0");
    }
    double good = 0.0;
    if (cs.p_f < 1.0) {
        const double denom = g * cs.k + 1.0;
        const double rho = cs.k * cs.k * g / denom;
        good = cs.k / (denom * denom) * rician_series(rho, cs.k, true, spec, diag);
    }
    double bad = 0.0;
    if (cs.p_f > 0.0) {
        // Q = E[h0 / (h0 + g)^2] over the shadowing level.
        bad = shadowing_expectation(
            cs,
            [g](double h0) {
                const double s = h0 + g;
                return h0 / (s * s);
            },
            spec);
    }
    return cs.p_f * bad + (1.0 - cs.p_f) * good;
}

double normalized_ratio_cdf(double g, const ChannelState& cs, const QuadratureSpec& spec,
                            NumericDiagnostics* diag) {
    if (!(g >= 0.0)) {
        throw DomainError("fading ratio CDF: argument must be >= 0");
    }
    if (g == 0.0) {
        return 0.0;
    }
    if (std::isinf(g)) {
        return 1.0;
    }
    double good = 0.0;
    if (cs.p_f < 1.0) {
        const double r = g / (g * cs.k + 1.0);
        const double rho = cs.k * cs.k * r;
        good = cs.k * r * rician_series(rho, cs.k, false, spec, diag);
    }
    double bad = 0.0;
    if (cs.p_f > 0.0) {
        bad = shadowing_expectation(cs, [g](double h0) { return g / (h0 + g); }, spec);
    }
    return std::clamp(cs.p_f * bad + (1.0 - cs.p_f) * good, 0.0, 1.0);
}

double fading_ratio_pdf(double h, const ChannelState& cs, const RayleighParams& rp,
                        const QuadratureSpec& spec) {
    if (!(h >= 0.0)) {
        throw DomainError("fading_ratio_pdf: h must be >= 0");
    }
    const double scale = rp.mean_power();
    return scale * normalized_ratio_pdf(scale * h, cs, spec);
}

double fading_ratio_cdf(double h, const ChannelState& cs, const RayleighParams& rp,
                        const QuadratureSpec& spec) {
    if (!(h >= 0.0)) {
        throw DomainError("fading_ratio_cdf: h must be >= 0");
    }
    return normalized_ratio_cdf(rp.mean_power() * h, cs, spec);
}

OffloadResult offload_probability(const NetworkConfig& cfg, const ChannelState& cs,
                                  const QuadratureSpec& spec) {
    cfg.validate();
    cs.validate();
    spec.validate();

    OffloadResult result;
    if (cfg.p_sat_tx == 0.0) {
        return result;
    }

    const double power_ratio = cfg.p_sat_tx / cfg.p_bs_tx;
    const double two_sigma2 = cfg.rayleigh().mean_power();
    // Distance-ratio threshold corresponding to normalised fading ratio g.
    auto threshold = [&](double g) { return power_ratio * g / two_sigma2; };

    NumericDiagnostics inner;
    auto integrand = [&](double g) {
        const double f = dist_ratio_cdf(threshold(g), cfg, spec, &inner);
        if (f == 0.0) {
            return 0.0;
        }
        return f * normalized_ratio_pdf(g, cs, spec, &inner);
    };

    // Below g_min the factor exp(-pi B r_s^2 r^(-2/eta)) is under e^-50, so
    // that stretch is dropped and charged to the error budget.
    constexpr double kShellCutoff = 50.0;
    const double r_min = std::pow(std::numbers::pi * cfg.b_intensity * cfg.r_s * cfg.r_s / kShellCutoff,
                                  cfg.eta / 2.0);
    const double g_min = r_min * two_sigma2 / power_ratio;
    const double g_top = std::max(1e4, g_min * 1e8);

    // Decade pieces keep every feature of the integrand resolvable on a
    // linear scale; the last piece runs to infinity.
    std::vector<double> cuts{g_min};
    while (cuts.back() * 10.0 < g_top) {
        cuts.push_back(cuts.back() * 10.0);
    }
    cuts.push_back(g_top);

    double total = 0.0;
    double error = std::exp(-kShellCutoff);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const auto piece = integrate_finite(integrand, cuts[i], cuts[i + 1], spec);
        total += piece.value;
        error += piece.diagnostics.est_abs_error;
        result.diagnostics.merge(piece.diagnostics);
    }
    const auto tail = integrate_semi_infinite(integrand, g_top, spec, g_top);
    total += tail.value;
    error += tail.diagnostics.est_abs_error;
    result.diagnostics.merge(tail.diagnostics);
    result.diagnostics.series_terms_used =
        std::max(result.diagnostics.series_terms_used, inner.series_terms_used);
    result.diagnostics.est_abs_error = error;

    if (error > 1e-6) {
        throw NonConvergence("offload_probability: error estimate " + std::to_string(error) +
                             " exceeds 1e-6");
    }
    result.p_s = std::clamp(total, 0.0, 1.0);
    result.est_error = error;
    return result;
}

}  // namespace leo
