#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace leo {

/// Process exit codes of the leo-offload tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitInternal = 1,
    kExitConfig = 2,        ///< bad config, flags or parameter values
    kExitNumeric = 3,       ///< numeric non-convergence
    kExitPlan = 4,          ///< planner found no bracket or no demand
    kExitDisagreement = 5,  ///< analytic and Monte Carlo results differ
};

/// Runs the tool on `args` (without the program name). Results go to `out`
/// unless --output names a file; diagnostics and warnings go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Shortest round-trip decimal form of v ("nan", "inf" and "-inf" for
/// non-finite values). Locale independent.
std::string format_double(double v);

}  // namespace leo
