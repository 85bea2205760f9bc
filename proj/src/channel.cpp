#include "leo/channel.hpp"

#include "leo/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace leo {

void ChannelState::validate() const {
    if (!(p_f >= 0.0 && p_f <= 1.0)) {
        throw DomainError("ChannelState: p_f must lie in [0, 1]");
    }
    if (!(k > 0.0) || !std::isfinite(k)) {
        throw DomainError("ChannelState: k must be > 0");
    }
    if (!(sigma_db >= 0.0) || !std::isfinite(sigma_db)) {
        throw DomainError("ChannelState: sigma_db must be >= 0");
    }
    if (!std::isfinite(mu_db) || !std::isfinite(t)) {
        throw DomainError("ChannelState: t and mu_db must be finite");
    }
}

void RayleighParams::validate() const {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw DomainError("RayleighParams: sigma must be > 0");
    }
}

ChannelTimeline::ChannelTimeline(std::vector<ChannelState> states, InterpolationMode mode)
    : states_(std::move(states)), mode_(mode) {
    if (states_.empty()) {
        throw DomainError("ChannelTimeline: at least one state is required");
    }
    for (std::size_t i = 0; i < states_.size(); ++i) {
        states_[i].validate();
        if (i > 0 && !(states_[i].t > states_[i - 1].t)) {
            throw DomainError("ChannelTimeline: t values must be strictly increasing");
        }
    }
}

ChannelTimeline default_timeline() {
    return ChannelTimeline({
        {0.0, 0.82, 3.1, -16.0, 5.0},
        {26.0, 0.79, 3.2, -14.0, 5.5},
        {52.0, 0.69, 3.7, -9.0, 4.7},
        {78.0, 0.51, 5.0, -8.6, 3.1},
        {104.0, 0.35, 6.2, -6.1, 1.2},
        {130.0, 0.27, 7.3, -3.5, 0.2},
    });
}

ChannelState timeline_lookup(const ChannelTimeline& timeline, double t) {
    const auto& rows = timeline.states();
    if (timeline.mode() == InterpolationMode::ExactMatchOnly) {
        for (const auto& row : rows) {
            if (std::abs(row.t - t) <= 1e-9 * std::max(1.0, std::abs(t))) {
                return row;
            }
        }
        throw NoExactMatch("no timeline row at t = " + std::to_string(t));
    }

    if (!(t >= rows.front().t && t <= rows.back().t)) {
        throw OutOfRange("t = " + std::to_string(t) + " outside timeline [" +
                         std::to_string(rows.front().t) + ", " + std::to_string(rows.back().t) + "]");
    }
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        const auto& a = rows[i];
        const auto& b = rows[i + 1];
        if (t <= b.t) {
            const double w = (t - a.t) / (b.t - a.t);
            auto lerp = [w](double x, double y) { return x + w * (y - x); };
            return {t, lerp(a.p_f, b.p_f), lerp(a.k, b.k), lerp(a.mu_db, b.mu_db),
                    lerp(a.sigma_db, b.sigma_db)};
        }
    }
    return rows.back();
}

double shadowing_expectation(const ChannelState& cs, const RealFunction& g, const QuadratureSpec& spec) {
    auto level = [&cs](double y) { return std::pow(10.0, (cs.mu_db + cs.sigma_db * y) / 10.0); };

    if (cs.sigma_db == 0.0) {
        return g(level(0.0));
    }
    if (cs.sigma_db < 0.3) {
        // Standard-normal variable y; split at the mean so each half decays.
        const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
        auto upper = [&](double y) { return norm * std::exp(-0.5 * y * y) * g(level(y)); };
        auto lower = [&](double y) { return norm * std::exp(-0.5 * y * y) * g(level(-y)); };
        return integrate_semi_infinite(upper, 0.0, spec, 1.0).value +
               integrate_semi_infinite(lower, 0.0, spec, 1.0).value;
    }

    const auto& rule = gauss_hermite_rule();
    const double spread = std::numbers::sqrt2 * cs.sigma_db;
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double h0 = std::pow(10.0, (cs.mu_db + spread * rule.nodes[i]) / 10.0);
        sum += rule.weights[i] * g(h0);
    }
    return sum / std::sqrt(std::numbers::pi);
}

double sat_power_pdf(double h, const ChannelState& cs, const QuadratureSpec& spec) {
    if (!(h >= 0.0)) {
        throw DomainError("sat_power_pdf: h must be >= 0");
    }
    double good = 0.0;
    if (cs.p_f < 1.0) {
        // K exp(-K(h+1)) I0(2K sqrt h), rewritten with the scaled Bessel function.
        const double root = std::sqrt(h);
        const double gap = root - 1.0;
        good = cs.k * std::exp(-cs.k * gap * gap) * bessel_i0_scaled(2.0 * cs.k * root);
    }
    double bad = 0.0;
    if (cs.p_f > 0.0) {
        bad = shadowing_expectation(
            cs, [h](double h0) { return std::exp(-h / h0) / h0; }, spec);
    }
    return (1.0 - cs.p_f) * good + cs.p_f * bad;
}

double sat_power_cdf(double h, const ChannelState& cs, const QuadratureSpec& spec) {
    if (!(h >= 0.0)) {
        throw DomainError("sat_power_cdf: h must be >= 0");
    }
    if (h == 0.0) {
        return 0.0;
    }
    double good = 0.0;
    if (cs.p_f < 1.0) {
        if (cs.k > 700.0) {
            throw DomainError("sat_power_cdf: Rice factor too large for the Poisson-Erlang sum");
        }
        // 2K|h_s|^2 is noncentral chi-square(2, 2K): a Poisson(K) mixture of
        // chi-square(2j+2), i.e. P(W <= 2Kh) = sum_j Pois(j;K) P(Gamma(j+1) <= Kh).
        const double y = cs.k * h;
        double mix = std::exp(-cs.k);  // Pois(j; K)
        double erlang_term = std::exp(-y);  // e^-y y^j / j!
        double tail_cdf = erlang_term;  // P(Poisson(y) <= j) = 1 - P(Gamma(j+1) <= y)
        double upper = mix * tail_cdf;
        double mass = mix;
        for (std::size_t j = 1; j < spec.series_max_terms; ++j) {
            const double jd = static_cast<double>(j);
            mix *= cs.k / jd;
            erlang_term *= y / jd;
            tail_cdf += erlang_term;
            upper += mix * std::min(tail_cdf, 1.0);
            mass += mix;
            if (jd > cs.k && mix < 1e-17 * mass) {
                break;
            }
        }
        good = std::clamp(1.0 - upper, 0.0, 1.0);
    }
    double bad = 0.0;
    if (cs.p_f > 0.0) {
        bad = shadowing_expectation(
            cs, [h](double h0) { return -std::expm1(-h / h0); }, spec);
    }
    return (1.0 - cs.p_f) * good + cs.p_f * bad;
}

double bs_power_cdf(double h, const RayleighParams& rp) {
    if (!(h >= 0.0)) {
        throw DomainError("bs_power_cdf: h must be >= 0");
    }
    return -std::expm1(-h / rp.mean_power());
}

}  // namespace leo
