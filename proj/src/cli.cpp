#include "leo/cli.hpp"

#include "leo/config.hpp"
#include "leo/errors.hpp"
#include "leo/offload.hpp"
#include "leo/planner.hpp"
#include "leo/sim.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#ifndef LEO_TOOL_VERSION
#define LEO_TOOL_VERSION "0.0.0"
#endif

namespace leo {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

namespace {

enum class Format { Json, Csv };

ordered_json nullable(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

struct Common {
    std::string config;
    std::string output;
    std::string format;
};

// Sweepable parameters, in CSV column order.
constexpr std::array<const char*, 6> kSweepParams{"t", "B", "N", "r_s", "p_sat_tx", "U"};

struct Vary {
    std::string param;
    double lo;
    double hi;
    std::size_t steps;
};

std::string utc_timestamp() {
    std::time_t now = std::time(nullptr);
    if (const char* sde = std::getenv("SOURCE_DATE_EPOCH"); sde != nullptr && *sde != '\0') {
        long long v = 0;
        const auto [ptr, ec] = std::from_chars(sde, sde + std::char_traits<char>::length(sde), v);
        if (ec == std::errc() && *ptr == '\0') {
            now = static_cast<std::time_t>(v);
        }
    }
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::array<char, 32> buf{};
    std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf.data();
}

class Emitter {
public:
    Emitter(std::ostream& out, std::string output, std::string command) : out_(out), output_(std::move(output)), command_(std::move(command)) {}

    void emit(const std::string& body, const RunConfig& rc) {
        if (output_.empty()) {
            out_ << body;
            return;
        }
        write_file(output_, body);
        ordered_json manifest{{"config_hash", fnv1a_hex(canonical_config(rc))},
                              {"command", command_},
                              {"seed", rc.sim.seed},
                              {"tool_version", LEO_TOOL_VERSION},
                              {"timestamp", utc_timestamp()}};
        write_file(output_ + ".manifest.json", manifest.dump(2) + "\n");
    }

private:
    static void write_file(const std::string& path, const std::string& body) {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw ConfigError(path, 0, "", "cannot open output file for writing");
        }
        f << body;
        if (!f) {
            throw ConfigError(path, 0, "", "write failed");
        }
    }

    std::ostream& out_;
    std::string output_;
    std::string command_;
};

Format pick_format(const std::string& requested, Format fallback) {
    if (requested.empty()) {
        return fallback;
    }
    if (requested == "json") {
        return Format::Json;
    }
    if (requested == "csv") {
        return Format::Csv;
    }
    throw ConfigError("--format", 0, "", "expected json or csv");
}

ordered_json diagnostics_json(const NumericDiagnostics& d) {
    return {{"integrand_evals", d.integrand_evals},
            {"subdivisions", d.subdivisions},
            {"series_terms_used", d.series_terms_used},
            {"cf_iters_used", d.cf_iters_used}};
}

struct GridPoint {
    std::optional<double> t;
    NetworkConfig net;
};

std::string csv_header() {
    std::string h;
    for (const char* p : kSweepParams) {
        h += p;
        h += ',';
    }
    return h + "p_s,est_error\n";
}

std::string csv_row(const GridPoint& g, const OffloadResult& r) {
    std::string row = g.t ? format_double(*g.t) : std::string();
    for (const double v : {g.net.b_intensity, g.net.n_sats, g.net.r_s, g.net.p_sat_tx, g.net.u_intensity}) {
        row += ',' + format_double(v);
    }
    return row + ',' + format_double(r.p_s) + ',' + format_double(r.est_error) + '\n';
}

void set_param(GridPoint& g, const std::string& param, double v) {
    if (param == "t") {
        g.t = v;
    } else if (param == "B") {
        g.net.b_intensity = v;
    } else if (param == "N") {
        g.net.n_sats = v;
    } else if (param == "r_s") {
        g.net.r_s = v;
    } else if (param == "p_sat_tx") {
        g.net.p_sat_tx = v;
    } else if (param == "U") {
        g.net.u_intensity = v;
    }
}

std::vector<GridPoint> build_grid(const RunConfig& rc, const std::vector<Vary>& vary) {
    std::vector<GridPoint> grid{{rc.channel.t, rc.network}};
    for (const auto& v : vary) {
        std::vector<GridPoint> next;
        for (const auto& base : grid) {
            for (std::size_t i = 0; i < v.steps; ++i) {
                const double x = v.steps == 1 ? v.lo
                                              : v.lo + (v.hi - v.lo) * static_cast<double>(i) /
                                                           static_cast<double>(v.steps - 1);
                GridPoint g = base;
                set_param(g, v.param, x);
                next.push_back(g);
            }
        }
        grid = std::move(next);
    }
    return grid;
}

RunConfig load(const std::string& path) { return load_config(resolve_config_path(path)); }

void override_t(RunConfig& rc, const Common& c, std::optional<double> t) {
    if (t) {
        if (!rc.channel.t) {
            throw ConfigError(c.config, 0, "channel.t", "--t needs a timeline-based channel");
        }
        rc.channel.t = t;
    }
}

int cmd_ps(const Common& c, std::optional<double> t, Emitter& emit) {
    RunConfig rc = load(c.config);
    override_t(rc, c, t);
    const GridPoint g{rc.channel.t, rc.network};
    const OffloadResult r = offload_probability(rc.network, rc.channel_state(), rc.quadrature);
    if (pick_format(c.format, Format::Json) == Format::Csv) {
        emit.emit(csv_header() + csv_row(g, r), rc);
        return kExitOk;
    }
    ordered_json j{{"t", nullable(g.t)},
                   {"p_s", r.p_s},
                   {"est_error", r.est_error},
                   {"diagnostics", diagnostics_json(r.diagnostics)}};
    emit.emit(j.dump(2) + "\n", rc);
    return kExitOk;
}

int cmd_sweep(const Common& c, const std::vector<Vary>& vary, unsigned jobs, Emitter& emit) {
    const RunConfig rc = load(c.config);
    for (const auto& v : vary) {
        if (v.param == "t" && !rc.channel.t) {
            throw ConfigError(c.config, 0, "channel.t", "sweeping t needs a timeline-based channel");
        }
    }
    const auto grid = build_grid(rc, vary);
    std::vector<OffloadResult> results(grid.size());

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        try {
            for (std::size_t i = next++; i < grid.size(); i = next++) {
                const ChannelState cs = grid[i].t ? timeline_lookup(rc.channel.timeline, *grid[i].t) : rc.channel.state;
                results[i] = offload_probability(grid[i].net, cs, rc.quadrature);
            }
        } catch (...) {
            const std::lock_guard lock(failure_mutex);
            if (!failure) {
                failure = std::current_exception();
            }
        }
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(grid.size())));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < workers; ++i) {
            pool.emplace_back(work);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    if (pick_format(c.format, Format::Csv) == Format::Json) {
        ordered_json rows = ordered_json::array();
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto& g = grid[i];
            rows.push_back({{"t", nullable(g.t)},
                            {"B", g.net.b_intensity},
                            {"N", g.net.n_sats},
                            {"r_s", g.net.r_s},
                            {"p_sat_tx", g.net.p_sat_tx},
                            {"U", g.net.u_intensity},
                            {"p_s", results[i].p_s},
                            {"est_error", results[i].est_error}});
        }
        emit.emit(rows.dump(2) + "\n", rc);
        return kExitOk;
    }
    std::string body = csv_header();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        body += csv_row(grid[i], results[i]);
    }
    emit.emit(body, rc);
    return kExitOk;
}

int cmd_plan(const Common& c, std::optional<double> epsilon, std::optional<double> area, Emitter& emit) {
    RunConfig rc = load(c.config);
    if (epsilon) {
        rc.planner.epsilon = *epsilon;
    }
    if (area) {
        rc.planner.region_area = area;
    }
    rc.planner.validate();
    const PlanResult pr = solve_plan(rc.network, rc.channel_state(), rc.planner, rc.quadrature);
    if (pick_format(c.format, Format::Json) == Format::Csv) {
        throw ConfigError("--format", 0, "", "plan results are JSON only");
    }
    ordered_json j{{"epsilon", rc.planner.epsilon},
                   {"n_real", pr.n_real},
                   {"n_opt", pr.n_opt},
                   {"p_s_opt", pr.p_s_opt},
                   {"f_empty_at_n_opt", pr.f_empty_at_n_opt},
                   {"density", pr.density},
                   {"n_local", nullable(pr.n_local)},
                   {"constraint_satisfied", pr.constraint_satisfied}};
    emit.emit(j.dump(2) + "\n", rc);
    return kExitOk;
}

int cmd_validate(const Common& c, std::optional<double> t, std::optional<std::uint64_t> trials,
                 std::optional<std::uint64_t> seed, double sigma_scale, std::ostream& err, Emitter& emit) {
    RunConfig rc = load(c.config);
    override_t(rc, c, t);
    if (trials) {
        rc.sim.trials = *trials;
    }
    if (seed) {
        rc.sim.seed = *seed;
    }
    rc.sim.validate();
    if (rc.sim.trials < 10'000) {
        err << "warning: " << rc.sim.trials << " trials give a wide standard error; the check has little power\n";
    }
    const ChannelState cs = rc.channel_state();
    const OffloadResult analytic = offload_probability(rc.network, cs, rc.quadrature);
    NetworkConfig sim_net = rc.network;
    sim_net.sigma *= sigma_scale;
    const SimEstimate mc = estimate_ps(sim_net, cs, rc.sim);

    // A sample proportion of exactly 0 or 1 has zero plug-in error; one
    // trial's worth of resolution stands in for it.
    const double se = std::max(mc.std_error, 1.0 / static_cast<double>(mc.trials));
    const double diff = mc.estimate - analytic.p_s;
    const bool agree = std::abs(diff) <= 3.0 * se;
    if (pick_format(c.format, Format::Json) == Format::Csv) {
        throw ConfigError("--format", 0, "", "validate results are JSON only");
    }
    ordered_json j{{"p_s_analytic", analytic.p_s},
                   {"est_error", analytic.est_error},
                   {"p_s_monte_carlo", mc.estimate},
                   {"std_error", mc.std_error},
                   {"trials", mc.trials},
                   {"seed", rc.sim.seed},
                   {"z", diff / se},
                   {"agree", agree}};
    emit.emit(j.dump(2) + "\n", rc);
    if (!agree) {
        err << "error: analytic and Monte Carlo offloading probabilities differ by " << format_double(diff / se)
            << " standard errors\n";
        return kExitDisagreement;
    }
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Offloading probability and constellation planning for satellite-terrestrial networks",
                 "leo-offload"};
    app.set_version_flag("--version", LEO_TOOL_VERSION);
    app.require_subcommand(1);

    Common common;
    auto add_common = [&](CLI::App* sub, const char* formats) {
        sub->add_option("config", common.config, "Config file (searched under $LEO_OFFLOAD_CONFIG_DIR too)")->required();
        sub->add_option("--output,-o", common.output, "Write results here plus a .manifest.json next to it");
        sub->add_option("--format", common.format, formats)->check(CLI::IsMember({"json", "csv"}));
    };

    std::optional<double> t;
    auto* ps = app.add_subcommand("ps", "Offloading probability for one configuration");
    add_common(ps, "json (default) or csv");
    ps->add_option("--t", t, "Pass time on the channel timeline [s]");

    std::vector<std::vector<std::string>> vary_raw;
    unsigned jobs = 1;
    auto* sweep = app.add_subcommand("sweep", "Offloading probability over a parameter grid");
    add_common(sweep, "csv (default) or json");
    sweep->add_option("--vary", vary_raw, "param lo hi steps; param is one of t, B, N, r_s, p_sat_tx, U")
        ->expected(4)
        ->allow_extra_args(false)
        ->required();
    sweep->add_option("--jobs,-j", jobs, "Grid points evaluated in parallel")->check(CLI::PositiveNumber);

    std::optional<double> epsilon;
    std::optional<double> area;
    auto* plan = app.add_subcommand("plan", "Smallest constellation meeting the idle-probability budget");
    add_common(plan, "json");
    plan->add_option("--epsilon", epsilon, "Idle-probability budget");
    plan->add_option("--region-area", area, "Region area [km^2] for the local satellite count");

    std::optional<std::uint64_t> trials;
    std::optional<std::uint64_t> seed;
    double sigma_scale = 1.0;
    auto* validate = app.add_subcommand("validate", "Check the analytic result against Monte Carlo");
    add_common(validate, "json");
    validate->add_option("--t", t, "Pass time on the channel timeline [s]");
    validate->add_option("--trials", trials, "Monte Carlo trials");
    validate->add_option("--seed", seed, "Monte Carlo seed");
    validate->add_option("--sim-sigma-scale", sigma_scale)->group("")->check(CLI::PositiveNumber);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    std::string command = "leo-offload";
    for (const auto& a : args) {
        command += ' ' + a;
    }
    Emitter emit(out, common.output, command);

    try {
        if (*ps) {
            return cmd_ps(common, t, emit);
        }
        if (*sweep) {
            std::vector<Vary> vary;
            for (const auto& raw : vary_raw) {
                Vary v{raw[0], 0.0, 0.0, 0};
                if (std::find_if(kSweepParams.begin(), kSweepParams.end(),
                                 [&](const char* p) { return v.param == p; }) == kSweepParams.end()) {
                    throw ConfigError("--vary", 0, v.param, "unknown parameter; use t, B, N, r_s, p_sat_tx or U");
                }
                try {
                    std::size_t used = 0;
                    v.lo = std::stod(raw[1], &used);
                    v.hi = std::stod(raw[2]);
                    const long long steps = std::stoll(raw[3]);
                    if (steps < 1) {
                        throw std::invalid_argument("steps");
                    }
                    v.steps = static_cast<std::size_t>(steps);
                } catch (const std::logic_error&) {
                    throw ConfigError("--vary", 0, v.param, "expected numbers: lo hi steps (steps >= 1)");
                }
                vary.push_back(v);
            }
            return cmd_sweep(common, vary, jobs, emit);
        }
        if (*plan) {
            return cmd_plan(common, epsilon, area, emit);
        }
        return cmd_validate(common, t, trials, seed, sigma_scale, err, emit);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NonConvergence& e) {
        err << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const NoBracket& e) {
        err << "plan error: " << e.what() << "\n";
        return kExitPlan;
    } catch (const Infeasible& e) {
        err << "plan error: " << e.what() << "\n";
        return kExitPlan;
    } catch (const DomainError& e) {
        err << "invalid parameter: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NoExactMatch& e) {
        err << "invalid parameter: " << e.what() << "\n";
        return kExitConfig;
    } catch (const OutOfRange& e) {
        err << "invalid parameter: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInternal;
    }
}

}  // namespace leo
