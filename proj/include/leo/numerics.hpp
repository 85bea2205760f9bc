#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace leo {

/// Tolerances and caps shared by every integral, series and continued fraction.
struct QuadratureSpec {
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    std::size_t max_subdivisions = 2000;
    std::size_t series_max_terms = 500;
    double series_term_tol = 1e-12;
    std::size_t cf_max_iters = 10000;
    double cf_tol = 1e-12;

    /// Throws DomainError unless every tolerance is > 0 and every cap is >= 1.
    void validate() const;
};

/// Work counters reported next to a numeric result.
///
/// `subdivisions`, `series_terms_used` and `cf_iters_used` are per-call peaks
/// (so they stay comparable with the caps in QuadratureSpec when merged);
/// `integrand_evals` and `est_abs_error` accumulate.
struct NumericDiagnostics {
    std::size_t integrand_evals = 0;
    std::size_t subdivisions = 0;
    std::size_t series_terms_used = 0;
    std::size_t cf_iters_used = 0;
    double est_abs_error = 0.0;

    void merge(const NumericDiagnostics& other);
};

struct Integral {
    double value = 0.0;
    NumericDiagnostics diagnostics;
};

using RealFunction = std::function<double(double)>;

/// Globally adaptive 7/15-point Gauss-Kronrod quadrature on [lo, hi].
///
/// Endpoints are never sampled, so integrable endpoint singularities are
/// allowed. Stops once the summed error estimate is at most
/// max(abs_tol, rel_tol * |I|); throws NonConvergence when the subdivision
/// cap is reached first and DomainError when lo >= hi.
Integral integrate_finite(const RealFunction& f, double lo, double hi, const QuadratureSpec& spec);

/// Integral over [lo, inf) through x = lo + scale * u / (1 - u).
///
/// `scale` should be the magnitude of x where the integrand carries its mass.
/// Requires f to decay at least like x^-2.
Integral integrate_semi_infinite(const RealFunction& f, double lo, const QuadratureSpec& spec,
                                 double scale);

/// Modified Bessel function I0(x), x >= 0.
double bessel_i0(double x);

/// exp(-x) * I0(x); finite for every x >= 0.
double bessel_i0_scaled(double x);

/// exp(-d) * M(n, n + 1, d) = n * int_0^1 x^(n-1) exp(-d (1 - x)) dx.
///
/// This is the overflow-free form of N exp(-D) gamma(N, -D) / (-D)^N. The value
/// lies in (0, 1] and equals 1 only at d = 0. For d > 50 max(n, 1) the large-d
/// expansion (n/d) sum_j (1-n)_j / d^j is used; otherwise the Poisson-weighted
/// series sum_k Pois(k; d) n/(n+k), summed outward from its mode or, when
/// d/(n+d)^2 is small, through its central-moment expansion.
double kummer_ratio_series(double n, double d, const QuadratureSpec& spec,
                           NumericDiagnostics* diag = nullptr);

/// The continued fraction W(n; d) = n+1 - d/(n+2 + (n+1)d/(n+3 - 2d/(n+4 + ...))),
/// evaluated with the modified Lentz method. 1/(1 + d/W) equals
/// kummer_ratio_series(n, d).
double cf_w(double n, double d, const QuadratureSpec& spec, NumericDiagnostics* diag = nullptr);

/// Physicists' Gauss-Hermite rule: sum_i w_i f(x_i) ~ int exp(-x^2) f(x) dx.
struct GaussHermiteRule {
    std::span<const double> nodes;
    std::span<const double> weights;
};

/// 64-point rule, built once on first use.
const GaussHermiteRule& gauss_hermite_rule();

namespace detail {

// Individual branches of kummer_ratio_series, exposed for switchover tests.
double kummer_ratio_asymptotic(double n, double d, const QuadratureSpec& spec, std::size_t* terms);
double kummer_ratio_poisson_sum(double n, double d, const QuadratureSpec& spec, std::size_t* terms);
double kummer_ratio_moment_expansion(double n, double d, const QuadratureSpec& spec,
                                     std::size_t* terms);

}  // namespace detail

}  // namespace leo
