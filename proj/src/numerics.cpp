#include "leo/numerics.hpp"

#include "leo/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <string>
#include <vector>

namespace leo {

void QuadratureSpec::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !(series_term_tol > 0.0) || !(cf_tol > 0.0)) {
        throw DomainError("QuadratureSpec: tolerances must be strictly positive");
    }
    if (max_subdivisions < 1 || series_max_terms < 1 || cf_max_iters < 1) {
        throw DomainError("QuadratureSpec: caps must be at least 1");
    }
}

void NumericDiagnostics::merge(const NumericDiagnostics& other) {
    integrand_evals += other.integrand_evals;
    subdivisions = std::max(subdivisions, other.subdivisions);
    series_terms_used = std::max(series_terms_used, other.series_terms_used);
    cf_iters_used = std::max(cf_iters_used, other.cf_iters_used);
    est_abs_error += other.est_abs_error;
}

// ============================================================================
// Adaptive Gauss-Kronrod
// ============================================================================

namespace {

constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for the odd Kronrod nodes 1, 3, 5 and the centre.
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double lo;
    double hi;
    double value;
    double error;

    bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gauss_kronrod_15(const RealFunction& f, double lo, double hi, std::size_t& evals) {
    const double centre = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double abs_half = std::abs(half);

    const double fc = f(centre);
    double kronrod = fc * kKronrodWeights[7];
    double gauss = fc * kGaussWeights[3];
    double resabs = std::abs(kronrod);

    std::array<double, 7> f1{};
    std::array<double, 7> f2{};
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * kKronrodNodes[j];
        f1[j] = f(centre - dx);
        f2[j] = f(centre + dx);
        const double pair = f1[j] + f2[j];
        kronrod += kKronrodWeights[j] * pair;
        resabs += kKronrodWeights[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 1) {
            gauss += kGaussWeights[j / 2] * pair;
        }
    }
    evals += 15;

    const double mean = 0.5 * kronrod;
    double resasc = kKronrodWeights[7] * std::abs(fc - mean);
    for (std::size_t j = 0; j < 7; ++j) {
        resasc += kKronrodWeights[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
    }

    const double value = kronrod * half;
    resabs *= abs_half;
    resasc *= abs_half;
    double error = std::abs((kronrod - gauss) * half);
    if (resasc != 0.0 && error != 0.0) {
        error = resasc * std::min(1.0, std::pow(200.0 * error / resasc, 1.5));
    }
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
        error = std::max(50.0 * eps * resabs, error);
    }
    if (!std::isfinite(value) || !std::isfinite(error)) {
        throw DomainError("integrand returned a non-finite value on [" + std::to_string(lo) +
                          ", " + std::to_string(hi) + "]");
    }
    return {lo, hi, value, error};
}

}  // namespace

Integral integrate_finite(const RealFunction& f, double lo, double hi, const QuadratureSpec& spec) {
    if (!(lo < hi)) {
        throw DomainError("integrate_finite: requires lo < hi");
    }
    Integral out;
    auto& diag = out.diagnostics;

    std::priority_queue<Segment> heap;
    Segment first = gauss_kronrod_15(f, lo, hi, diag.integrand_evals);
    double total = first.value;
    double total_error = first.error;
    heap.push(first);

    auto tolerance = [&] { return std::max(spec.abs_tol, spec.rel_tol * std::abs(total)); };

    while (total_error > tolerance()) {
        if (diag.subdivisions >= spec.max_subdivisions) {
            throw NonConvergence("integrate_finite: subdivision cap reached with error " +
                                 std::to_string(total_error));
        }
        Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (mid <= worst.lo || mid >= worst.hi) {
            throw NonConvergence("integrate_finite: interval collapsed to roundoff near " +
                                 std::to_string(worst.lo));
        }
        Segment left = gauss_kronrod_15(f, worst.lo, mid, diag.integrand_evals);
        Segment right = gauss_kronrod_15(f, mid, worst.hi, diag.integrand_evals);
        ++diag.subdivisions;

        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);

        // Re-sum periodically; the running totals drift after many updates.
        if (diag.subdivisions % 64 == 0) {
            auto copy = heap;
            total = 0.0;
            total_error = 0.0;
            while (!copy.empty()) {
                total += copy.top().value;
                total_error += copy.top().error;
                copy.pop();
            }
        }
    }

    out.value = total;
    diag.est_abs_error = total_error;
    return out;
}

Integral integrate_semi_infinite(const RealFunction& f, double lo, const QuadratureSpec& spec,
                                 double scale) {
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw DomainError("integrate_semi_infinite: scale must be positive and finite");
    }
    auto mapped = [&](double u) {
        const double one_minus = 1.0 - u;
        const double x = lo + scale * u / one_minus;
        if (!std::isfinite(x)) {
            return 0.0;
        }
        const double fx = f(x);
        if (fx == 0.0) {
            return 0.0;
        }
        return fx * scale / (one_minus * one_minus);
    };
    return integrate_finite(mapped, 0.0, 1.0, spec);
}

// ============================================================================
// Bessel I0
// ============================================================================

namespace {

constexpr double kBesselSeriesLimit = 30.0;

// Power series sum (x/2)^{2k} / (k!)^2; all terms positive.
double bessel_i0_series(double x) {
    const double q = 0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 500; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
        if (term < 1e-17 * sum) {
            break;
        }
    }
    return sum;
}

// Large-x expansion of exp(-x) I0(x) = (2 pi x)^{-1/2} sum_k c_k / x^k.
double bessel_i0_scaled_asymptotic(double x) {
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 60; ++k) {
        const double odd = 2.0 * k - 1.0;
        const double next = term * odd * odd / (8.0 * k * x);
        if (next > term) {
            break;
        }
        term = next;
        sum += term;
        if (term < 1e-17 * sum) {
            break;
        }
    }
    return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

}  // namespace

double bessel_i0(double x) {
    if (x < 0.0 || std::isnan(x)) {
        throw DomainError("bessel_i0: argument must be >= 0");
    }
    if (x <= kBesselSeriesLimit) {
        return bessel_i0_series(x);
    }
    return std::exp(x) * bessel_i0_scaled_asymptotic(x);
}

double bessel_i0_scaled(double x) {
    if (x < 0.0 || std::isnan(x)) {
        throw DomainError("bessel_i0_scaled: argument must be >= 0");
    }
    if (x <= kBesselSeriesLimit) {
        return std::exp(-x) * bessel_i0_series(x);
    }
    return bessel_i0_scaled_asymptotic(x);
}

// ============================================================================
// exp(-d) M(n, n+1, d)
// ============================================================================

namespace detail {

double kummer_ratio_asymptotic(double n, double d, const QuadratureSpec& spec, std::size_t* terms) {
    double term = 1.0;
    double sum = 1.0;
    std::size_t used = 1;
    for (;;) {
        const double j = static_cast<double>(used - 1);
        const double next = term * (j + 1.0 - n) / d;
        if (next == 0.0) {
            break;  // integer n: the expansion terminates
        }
        if (std::abs(next) > std::abs(term)) {
            throw NonConvergence("kummer_ratio_series: large-d expansion diverged before tolerance");
        }
        term = next;
        sum += term;
        ++used;
        if (std::abs(term) < spec.series_term_tol * std::abs(sum)) {
            break;
        }
        if (used >= spec.series_max_terms) {
            throw NonConvergence("kummer_ratio_series: large-d expansion hit the term cap");
        }
    }
    if (terms != nullptr) {
        *terms = used;
    }
    return n / d * sum;
}

double kummer_ratio_poisson_sum(double n, double d, const QuadratureSpec& spec, std::size_t* terms) {
    // Unnormalised Poisson weights, 1 at the mode; dividing by their sum
    // removes the need for exp(-d) d^m / m! itself.
    const double mode = std::floor(d);
    double weight_sum = 1.0;
    double value_sum = n / (n + mode);
    std::size_t used = 1;

    double w = 1.0;
    for (double k = mode; ; k += 1.0) {
        w *= d / (k + 1.0);
        weight_sum += w;
        value_sum += w * n / (n + k + 1.0);
        ++used;
        if (w < spec.series_term_tol * weight_sum) {
            break;
        }
        if (used >= spec.series_max_terms) {
            throw NonConvergence("kummer_ratio_series: Poisson series hit the term cap");
        }
    }
    w = 1.0;
    for (double k = mode; k > 0.0; k -= 1.0) {
        w *= k / d;
        weight_sum += w;
        value_sum += w * n / (n + k - 1.0);
        ++used;
        if (w < spec.series_term_tol * weight_sum) {
            break;
        }
        if (used >= spec.series_max_terms) {
            throw NonConvergence("kummer_ratio_series: Poisson series hit the term cap");
        }
    }
    if (terms != nullptr) {
        *terms = used;
    }
    return value_sum / weight_sum;
}

double kummer_ratio_moment_expansion(double n, double d, const QuadratureSpec& spec,
                                     std::size_t* terms) {
    // E[n/(n+K)], K ~ Poisson(d), expanded about K = d:
    //   (n/s) sum_j (-1)^j mu_j / s^j,  s = n + d,
    // with Poisson central moments mu_{j+1} = d sum_{i<j} C(j,i) mu_i.
    const double s = n + d;
    std::vector<double> nu{1.0, 0.0};  // nu_j = mu_j / s^j
    std::vector<double> binom{1.0, 1.0};  // row j of Pascal's triangle, j = 1
    double sum = 1.0;
    double prev_even = 1.0;
    std::size_t used = 2;
    for (std::size_t j = 1;; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < j; ++i) {
            acc += binom[i] * nu[i] * std::pow(s, static_cast<double>(i) - static_cast<double>(j));
        }
        const double next = d / s * acc;
        nu.push_back(next);
        ++used;
        const std::size_t order = j + 1;
        sum += (order % 2 == 0 ? next : -next);

        if (order % 2 == 0) {
            if (order > 4 && std::abs(next) > std::abs(prev_even)) {
                throw NonConvergence("kummer_ratio_series: moment expansion diverged");
            }
            if (std::abs(next) < spec.series_term_tol * std::abs(sum) &&
                std::abs(nu[order - 1]) < spec.series_term_tol * std::abs(sum)) {
                break;
            }
            prev_even = next;
        }
        if (used >= spec.series_max_terms) {
            throw NonConvergence("kummer_ratio_series: moment expansion hit the term cap");
        }

        std::vector<double> row(binom.size() + 1, 1.0);
        for (std::size_t i = 1; i < binom.size(); ++i) {
            row[i] = binom[i - 1] + binom[i];
        }
        binom = std::move(row);
    }
    if (terms != nullptr) {
        *terms = used;
    }
    return n / s * sum;
}

}  // namespace detail

double kummer_ratio_series(double n, double d, const QuadratureSpec& spec, NumericDiagnostics* diag) {
    if (!(n > 0.0) || !(d >= 0.0) || !std::isfinite(n)) {
        throw DomainError("kummer_ratio_series: requires n > 0 and d >= 0");
    }
    if (d == 0.0) {
        return 1.0;
    }
    if (std::isinf(d)) {
        return 0.0;
    }
    std::size_t terms = 0;
    double value = 0.0;
    const double s = n + d;
    if (d > 50.0 * std::max(n, 1.0)) {
        value = detail::kummer_ratio_asymptotic(n, d, spec, &terms);
    } else if (s >= 100.0 && d / (s * s) <= 2e-3) {
        value = detail::kummer_ratio_moment_expansion(n, d, spec, &terms);
    } else {
        value = detail::kummer_ratio_poisson_sum(n, d, spec, &terms);
    }
    if (diag != nullptr) {
        diag->series_terms_used = std::max(diag->series_terms_used, terms);
    }
    return value;
}

double cf_w(double n, double d, const QuadratureSpec& spec, NumericDiagnostics* diag) {
    if (!(n > 0.0) || !(d >= 0.0) || !std::isfinite(n) || !std::isfinite(d)) {
        throw DomainError("cf_w: requires n > 0 and finite d >= 0");
    }
    if (d == 0.0) {
        return n + 1.0;
    }
    constexpr double tiny = 1e-300;
    double f = n + 1.0;
    double c = f;
    double dd = 0.0;
    for (std::size_t j = 1; j <= spec.cf_max_iters; ++j) {
        // Partial numerators alternate -m d (odd j = 2m-1) and +(n+m) d (even j = 2m).
        const double m = static_cast<double>((j + 1) / 2);
        const double a = (j % 2 == 1) ? -m * d : (n + m) * d;
        const double b = n + 1.0 + static_cast<double>(j);
        dd = b + a * dd;
        if (std::abs(dd) < tiny) {
            dd = tiny;
        }
        c = b + a / c;
        if (std::abs(c) < tiny) {
            c = tiny;
        }
        dd = 1.0 / dd;
        const double delta = c * dd;
        f *= delta;
        if (std::abs(delta - 1.0) < spec.cf_tol) {
            if (diag != nullptr) {
                diag->cf_iters_used = std::max(diag->cf_iters_used, j);
            }
            return f;
        }
    }
    throw NonConvergence("cf_w: iteration cap reached");
}

// ============================================================================
// Gauss-Hermite
// ============================================================================

namespace {

struct HermiteTable {
    std::vector<double> nodes;
    std::vector<double> weights;
};

HermiteTable build_hermite(std::size_t count) {
    HermiteTable table{std::vector<double>(count), std::vector<double>(count)};
    const double pim4 = std::pow(std::numbers::pi, -0.25);
    const double n = static_cast<double>(count);
    double z = 0.0;
    for (std::size_t i = 0; i < (count + 1) / 2; ++i) {
        if (i == 0) {
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
        } else if (i == 1) {
            z -= 1.14 * std::pow(n, 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * table.nodes[0];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * table.nodes[1];
        } else {
            z = 2.0 * z - table.nodes[i - 2];
        }
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = pim4;
            double p2 = 0.0;
            for (std::size_t j = 1; j <= count; ++j) {
                const double p3 = p2;
                p2 = p1;
                const double jd = static_cast<double>(j);
                p1 = z * std::sqrt(2.0 / jd) * p2 - std::sqrt((jd - 1.0) / jd) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) {
                break;
            }
        }
        table.nodes[i] = z;
        table.nodes[count - 1 - i] = -z;
        table.weights[i] = 2.0 / (pp * pp);
        table.weights[count - 1 - i] = table.weights[i];
    }
    return table;
}

}  // namespace

const GaussHermiteRule& gauss_hermite_rule() {
    static const HermiteTable table = build_hermite(64);
    static const GaussHermiteRule rule{table.nodes, table.weights};
    return rule;
}

}  // namespace leo
