#include "leo/planner.hpp"

#include "leo/errors.hpp"
#include "leo/offload.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace leo {

void PlannerConfig::validate() const {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw DomainError("PlannerConfig: epsilon must lie in (0, 1)");
    }
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw DomainError("PlannerConfig: c must be > 0");
    }
    if (region_area && !(*region_area > 0.0)) {
        throw DomainError("PlannerConfig: region_area must be > 0");
    }
    if (!(root_tol > 0.0)) {
        throw DomainError("PlannerConfig: root_tol must be > 0");
    }
    if (n_lo && n_hi && !(*n_lo < *n_hi)) {
        throw DomainError("PlannerConfig: n_lo must be < n_hi");
    }
    if (n_lo && !(*n_lo > c)) {
        throw DomainError("PlannerConfig: n_lo must exceed c");
    }
}

namespace {

struct IdleGap {
    const NetworkConfig& base;
    const PlannerConfig& pc;
    const OffloadModel& model;

    double p_s(double n) const {
        NetworkConfig cfg = base;
        cfg.n_sats = n;
        return model(cfg);
    }
    double idle(double n, double ps) const {
        return empty_prob_approx(n, ps * base.u_intensity, base, pc.c).value;
    }
    double operator()(double n) const { return idle(n, p_s(n)) - pc.epsilon; }
};

}  // namespace

PlanResult solve_plan(const NetworkConfig& cfg, const PlannerConfig& pc, const OffloadModel& model) {
    cfg.validate();
    pc.validate();
    const IdleGap gap{cfg, pc, model};

    const double radius = cfg.shell_radius();
    const double saturated_root = pc.c * radius * radius * cfg.u_intensity / (1.0 - pc.epsilon);
    const double lo = pc.n_lo.value_or(std::ceil(pc.c) + 1.0);
    const double hi = pc.n_hi.value_or(std::max(1e6, std::ceil(1.01 * saturated_root) + 1.0));
    if (!(lo < hi)) {
        throw DomainError("solve_plan: empty bracket");
    }

    double g_lo = gap(lo);
    if (g_lo > 0.0) {
        throw Infeasible("solve_plan: idle probability already exceeds epsilon at n = " +
                         std::to_string(lo) + " (no offloaded demand to serve)");
    }
    double g_hi = gap(hi);
    if (g_hi < 0.0) {
        throw NoBracket("solve_plan: idle probability stays below epsilon up to n = " + std::to_string(hi));
    }

    // Monotonicity check on a log-spaced grid across the bracket.
    constexpr int kProbes = 12;
    double prev = g_lo;
    for (int i = 1; i < kProbes; ++i) {
        const double n = lo * std::pow(hi / lo, static_cast<double>(i) / kProbes);
        const double g = gap(n);
        if (!(g > prev)) {
            throw Error("solve_plan: idle probability is not increasing in n near n = " + std::to_string(n));
        }
        prev = g;
    }
    if (!(g_hi > prev)) {
        throw Error("solve_plan: idle probability is not increasing in n near the upper bracket");
    }

    // Illinois variant of regula falsi on log n; g is close to linear there.
    double a = std::log(lo);
    double b = std::log(hi);
    double ga = g_lo;
    double gb = g_hi;
    int side = 0;
    double root = hi;
    for (int iter = 0; iter < 400; ++iter) {
        double x = (a * gb - b * ga) / (gb - ga);
        if (!(x > a && x < b)) {
            x = 0.5 * (a + b);
        }
        const double gx = gap(std::exp(x));
        root = std::exp(x);
        if (std::abs(gx) <= 0.01 * pc.root_tol || (b - a) <= 1e-12) {
            break;
        }
        if (gx < 0.0) {
            a = x;
            ga = gx;
            if (side == -1) {
                gb *= 0.5;
            }
            side = -1;
        } else {
            b = x;
            gb = gx;
            if (side == 1) {
                ga *= 0.5;
            }
            side = 1;
        }
        if (iter == 399) {
            throw NonConvergence("solve_plan: root search did not converge");
        }
    }

    PlanResult result;
    result.n_real = root;
    result.n_opt = static_cast<long long>(std::ceil(root));
    const double n_opt = static_cast<double>(result.n_opt);
    result.p_s_opt = gap.p_s(n_opt);
    result.f_empty_at_n_opt = gap.idle(n_opt, result.p_s_opt);
    result.constraint_satisfied = result.f_empty_at_n_opt <= pc.epsilon + pc.root_tol;
    result.density = n_opt / (4.0 * std::numbers::pi * radius * radius);
    if (pc.region_area) {
        result.n_local = local_count(result, *pc.region_area);
    }
    return result;
}

PlanResult solve_plan(const NetworkConfig& cfg, const ChannelState& cs, const PlannerConfig& pc,
                      const QuadratureSpec& spec) {
    cs.validate();
    spec.validate();
    return solve_plan(cfg, pc, [&](const NetworkConfig& c) { return offload_probability(c, cs, spec).p_s; });
}

double local_count(const PlanResult& pr, double area) {
    if (!(area > 0.0) || !std::isfinite(area)) {
        throw DomainError("local_count: area must be > 0");
    }
    return pr.density * area;
}

}  // namespace leo
