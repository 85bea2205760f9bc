#include "leo/geometry.hpp"

#include "leo/errors.hpp"

#include <cmath>
#include <numbers>

namespace leo {

void NetworkConfig::validate() const {
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!positive(r_e) || !positive(r_s)) {
        throw DomainError("NetworkConfig: r_e and r_s must be > 0");
    }
    if (!positive(n_sats)) {
        throw DomainError("NetworkConfig: n_sats must be > 0");
    }
    if (!positive(b_intensity)) {
        throw DomainError("NetworkConfig: b_intensity must be > 0");
    }
    if (!(u_intensity >= 0.0) || !std::isfinite(u_intensity)) {
        throw DomainError("NetworkConfig: u_intensity must be >= 0");
    }
    if (!(p_sat_tx >= 0.0) || !std::isfinite(p_sat_tx) || !positive(p_bs_tx)) {
        throw DomainError("NetworkConfig: p_sat_tx must be >= 0 and p_bs_tx > 0");
    }
    if (!(eta > 2.0) || !std::isfinite(eta)) {
        throw DomainError("NetworkConfig: eta must be > 2");
    }
    if (!positive(sigma)) {
        throw DomainError("NetworkConfig: sigma must be > 0");
    }
}

namespace {

// Fraction of the shell within distance r of the user: (r^2 - r_s^2) / (4 r_e (r_e + r_s)).
double cap_fraction(double r, const NetworkConfig& cfg) {
    return (r * r - cfg.r_s * cfg.r_s) / (4.0 * cfg.r_e * cfg.shell_radius());
}

void check_support(double r, const NetworkConfig& cfg, const char* who) {
    if (!(r >= cfg.r_s && r <= 2.0 * cfg.r_e + cfg.r_s)) {
        throw DomainError(std::string(who) + ": r outside [r_s, 2 r_e + r_s]");
    }
}

}  // namespace

double sat_nearest_pdf(double r, const NetworkConfig& cfg) {
    check_support(r, cfg, "sat_nearest_pdf");
    const double x = std::min(cap_fraction(r, cfg), 1.0);
    const double survivor = (cfg.n_sats == 1.0) ? 1.0 : std::exp((cfg.n_sats - 1.0) * std::log1p(-x));
    return cfg.n_sats * survivor * r / (2.0 * cfg.r_e * cfg.shell_radius());
}

double sat_nearest_cdf(double r, const NetworkConfig& cfg) {
    if (r <= cfg.r_s) {
        return 0.0;
    }
    if (r >= 2.0 * cfg.r_e + cfg.r_s) {
        return 1.0;
    }
    return -std::expm1(cfg.n_sats * std::log1p(-cap_fraction(r, cfg)));
}

double bs_nearest_cdf(double r, const NetworkConfig& cfg) {
    if (!(r >= 0.0)) {
        throw DomainError("bs_nearest_cdf: r must be >= 0");
    }
    return -std::expm1(-cfg.b_intensity * std::numbers::pi * r * r);
}

RatioExponents ratio_exponents(double r, const NetworkConfig& cfg) {
    const double scaled = std::pow(r, -2.0 / cfg.eta);
    const double base = std::numbers::pi * cfg.b_intensity * scaled;
    return {base * cfg.r_s * cfg.r_s, 4.0 * base * cfg.r_e * cfg.shell_radius()};
}

double dist_ratio_cdf(double r, const NetworkConfig& cfg, const QuadratureSpec& spec,
                      NumericDiagnostics* diag) {
    if (!(r >= 0.0)) {
        throw DomainError("dist_ratio_cdf: r must be >= 0");
    }
    if (r == 0.0) {
        return 0.0;
    }
    if (std::isinf(r)) {
        return 1.0;
    }
    const auto [shell_term, cap_term] = ratio_exponents(r, cfg);
    if (shell_term > 745.0) {
        return 0.0;
    }
    return std::exp(-shell_term) * kummer_ratio_series(cfg.n_sats, cap_term, spec, diag);
}

}  // namespace leo
