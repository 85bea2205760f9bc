#pragma once

#include "leo/capacity.hpp"
#include "leo/channel.hpp"
#include "leo/geometry.hpp"
#include "leo/numerics.hpp"

#include <functional>
#include <optional>

namespace leo {

struct PlannerConfig {
    double epsilon = 0.1;  ///< idle-probability budget, 0 < epsilon < 1
    double c = kVoronoiShape;
    std::optional<double> region_area;  ///< km^2, for the region-local count
    std::optional<double> n_lo;
    std::optional<double> n_hi;
    double root_tol = 1e-6;

    void validate() const;
};

struct PlanResult {
    double n_real = 0.0;
    long long n_opt = 0;
    double p_s_opt = 0.0;
    double f_empty_at_n_opt = 0.0;
    double density = 0.0;  ///< satellites per km^2 of shell
    std::optional<double> n_local;
    bool constraint_satisfied = false;
};

/// Offloading probability as a function of the constellation size. The
/// network config passed in already carries that size.
using OffloadModel = std::function<double(const NetworkConfig&)>;

/// Smallest constellation at which the idle probability
/// f(n) = 1 - c (r_e+r_s)^2 P_s(n) U / n reaches epsilon.
///
/// Default bracket: n_lo = ceil(c) + 1 and n_hi large enough to cover the
/// saturated root c (r_e+r_s)^2 U / (1 - epsilon). Throws Infeasible when
/// f(n_lo) already exceeds epsilon (no demand), NoBracket when f(n_hi) is
/// still below it, and Error if f is not increasing on the bracket.
PlanResult solve_plan(const NetworkConfig& cfg, const ChannelState& cs, const PlannerConfig& pc,
                      const QuadratureSpec& spec);

/// Same search with a caller-supplied P_s(n).
PlanResult solve_plan(const NetworkConfig& cfg, const PlannerConfig& pc, const OffloadModel& model);

/// Satellites over a region of the given area at the plan's density.
double local_count(const PlanResult& pr, double area);

}  // namespace leo
