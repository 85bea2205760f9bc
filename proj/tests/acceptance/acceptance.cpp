// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//
//   acceptance                  run every criterion
//   acceptance --write-golden   regenerate tests/golden/ from the current build

#include "leo/capacity.hpp"
#include "leo/channel.hpp"
#include "leo/cli.hpp"
#include "leo/geometry.hpp"
#include "leo/numerics.hpp"
#include "leo/offload.hpp"
#include "leo/planner.hpp"
#include "leo/random.hpp"
#include "leo/sim.hpp"
#include "support/oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace leo;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = LEO_SOURCE_DIR;

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) {
                detail += "; ";
            }
            detail += what;
        }
    }
};

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

NetworkConfig criterion_network(double b, double n) {
    NetworkConfig cfg;
    cfg.r_s = 500.0;
    cfg.p_sat_tx = 8.0;
    cfg.b_intensity = b;
    cfg.n_sats = n;
    return cfg;
}

struct GridCase {
    double b;
    double n;
};
constexpr GridCase kCases[] = {{0.3, 1e3}, {1.0, 1e4}};

Outcome oracle_equivalence() {
    Outcome o;
    const QuadratureSpec spec;
    const auto rows = default_timeline().states();
    double worst_z = 0.0;
    std::uint64_t seed = 1000;
    for (const auto& c : kCases) {
        for (const auto& row : rows) {
            const auto cfg = criterion_network(c.b, c.n);
            const double analytic = offload_probability(cfg, row, spec).p_s;
            SimConfig sc;
            sc.trials = 1'000'000;
            sc.seed = seed++;
            const auto mc = estimate_ps(cfg, row, sc);
            const double z = (mc.estimate - analytic) / mc.std_error;
            worst_z = std::max(worst_z, std::abs(z));
            o.require(std::abs(z) <= 3.0, "B=" + fmt(c.b) + " N=" + fmt(c.n) + " t=" + fmt(row.t) + " z=" + fmt(z));
        }
    }
    if (o.pass) {
        o.detail = "12 configs, max |z| = " + fmt(worst_z);
    }
    return o;
}

Outcome pass_curve() {
    Outcome o;
    const QuadratureSpec spec;
    const auto rows = default_timeline().states();
    for (const auto& c : kCases) {
        const auto cfg = criterion_network(c.b, c.n);
        std::vector<double> ps;
        for (const auto& row : rows) {
            ps.push_back(offload_probability(cfg, row, spec).p_s);
        }
        for (std::size_t i = 1; i < ps.size(); ++i) {
            o.require(ps[i] >= ps[i - 1], "decrease at t=" + fmt(rows[i].t) + " for B=" + fmt(c.b));
        }
        o.require(ps.front() < ps.back(), "t=0 not below t=130 for B=" + fmt(c.b));
        if (c.b == 0.3) {
            o.require(ps.back() >= 0.95, "P_s(t=130, B=0.3, N=1e3) = " + fmt(ps.back()));
            if (o.pass) {
                o.detail = "P_s(t=130, B=0.3, N=1e3) = " + fmt(ps.back());
            }
        }
    }
    return o;
}

Outcome constellation_growth() {
    Outcome o;
    const QuadratureSpec spec;
    double min_margin = INFINITY;
    for (const auto& row : default_timeline().states()) {
        for (double b : {0.3, 1.0}) {
            OffloadResult prev{};
            bool first = true;
            for (double n : {10.0, 100.0, 1e3, 1e4}) {
                const auto r = offload_probability(criterion_network(b, n), row, spec);
                if (!first) {
                    const double gap = r.p_s - prev.p_s;
                    const double needed = 10.0 * std::max(r.est_error, prev.est_error);
                    min_margin = std::min(min_margin, gap / std::max(needed, 1e-300));
                    o.require(gap > needed, "t=" + fmt(row.t) + " B=" + fmt(b) + " N=" + fmt(n) + " gap " + fmt(gap));
                }
                prev = r;
                first = false;
            }
        }
    }
    if (o.pass) {
        o.detail = "smallest gap / (10 est_error) = " + fmt(min_margin);
    }
    return o;
}

Outcome empty_probability_consistency() {
    Outcome o;
    const QuadratureSpec spec;
    const NetworkConfig cfg;
    const double r2 = cfg.shell_radius() * cfg.shell_radius();
    double worst_ratio = 0.0;
    for (double n : {100.0, 300.0, 1000.0, 3000.0, 1e4}) {
        for (double frac : {0.05, 0.2, 0.4, 0.6, 0.8}) {
            const double u = frac * n / (kVoronoiShape * r2);
            const auto approx = empty_prob_approx(n, u, cfg);
            const double exact = empty_prob_exact(n, u, cfg, spec);
            const double bound = empty_prob_third_term(n, u, cfg);
            worst_ratio = std::max(worst_ratio, std::abs(exact - approx.value) / bound);
            o.require(approx.valid_regime && std::abs(exact - approx.value) <= bound,
                      "grid n=" + fmt(n) + " load=" + fmt(frac));
        }
    }
    SimConfig sc;
    sc.trials = 10'000;
    struct Point {
        double n, frac;
    };
    double worst_dev = 0.0;
    std::uint64_t seed = 4000;
    for (const auto& p : {Point{100.0, 0.3}, Point{300.0, 0.5}, Point{500.0, 0.8}}) {
        const double u = p.frac * p.n / (kVoronoiShape * r2);
        sc.seed = seed++;
        const auto mc = estimate_empty_fraction(p.n, u, cfg, sc);
        const double exact = empty_prob_exact(p.n, u, cfg, spec);
        const double dev = std::abs(mc.estimate - exact);
        worst_dev = std::max(worst_dev, dev);
        o.require(dev <= 3.0 * mc.std_error + 0.02,
                  "Monte Carlo n=" + fmt(p.n) + " load=" + fmt(p.frac) + ": " + fmt(mc.estimate) + " vs " + fmt(exact));
    }
    if (o.pass) {
        o.detail = "max |err|/bound = " + fmt(worst_ratio) + ", max Monte Carlo deviation = " + fmt(worst_dev);
    }
    return o;
}

NetworkConfig planner_network() {
    NetworkConfig cfg;
    cfg.r_s = 600.0;
    cfg.b_intensity = 0.5;
    cfg.u_intensity = 1.0;
    cfg.p_sat_tx = 5.0;
    return cfg;
}

Outcome planner_behaviour() {
    Outcome o;
    const QuadratureSpec spec;
    const ChannelState cs{130, 0.27, 7.3, -3.5, 0.2};
    const PlannerConfig pc;

    // (a) fixed P_s
    NetworkConfig fixed_net;
    fixed_net.u_intensity = 1e-3;
    const double p_bar = 0.6;
    const auto fixed = solve_plan(fixed_net, pc, [&](const NetworkConfig&) { return p_bar; });
    const double expected = pc.c * fixed_net.shell_radius() * fixed_net.shell_radius() * p_bar * fixed_net.u_intensity /
                            (1.0 - pc.epsilon);
    o.require(std::abs(fixed.n_real - expected) <= 1e-6 * expected, "(a) root " + fmt(fixed.n_real) + " vs " + fmt(expected));

    // (b) idle probability at the real-valued root
    const auto base = solve_plan(planner_network(), cs, pc, spec);
    NetworkConfig at_root = planner_network();
    at_root.n_sats = base.n_real;
    const double ps_root = offload_probability(at_root, cs, spec).p_s;
    const double f_root = empty_prob_approx(base.n_real, ps_root * at_root.u_intensity, at_root, pc.c).value;
    o.require(std::abs(f_root - pc.epsilon) <= 1e-6, "(b) f at root = " + fmt(f_root));

    // (c) tripled demand
    auto heavy_net = planner_network();
    heavy_net.u_intensity = 3.0;
    const auto heavy = solve_plan(heavy_net, cs, pc, spec);
    const double growth = heavy.n_real / base.n_real;
    o.require(std::abs(heavy.p_s_opt - base.p_s_opt) <= 0.05, "(c) P_s_opt moved by " + fmt(heavy.p_s_opt - base.p_s_opt));
    o.require(std::abs(growth - 3.0) <= 0.3, "(c) n_real grew by " + fmt(growth));

    // (d) lower altitude and stronger satellites both raise P_s_opt
    auto high_net = planner_network();
    high_net.r_s = 900.0;
    const auto high = solve_plan(high_net, cs, pc, spec);
    o.require(base.p_s_opt > high.p_s_opt, "(d) P_s_opt not higher at 600 km than at 900 km");
    auto weak_net = planner_network();
    weak_net.p_sat_tx = 3.0;
    const auto weak = solve_plan(weak_net, cs, pc, spec);
    o.require(base.p_s_opt > weak.p_s_opt, "(d) P_s_opt not higher at 5 W than at 3 W");

    if (o.pass) {
        o.detail = "P_s_opt = " + fmt(base.p_s_opt) + ", n_opt = " + std::to_string(base.n_opt) + "; n_real at 3 W / 5 W = " +
                   fmt(weak.n_real / base.n_real) + ", at 900 km / 600 km = " + fmt(high.n_real / base.n_real);
    }
    return o;
}

Outcome sampler_suite() {
    Outcome o;
    const QuadratureSpec spec;
    const RayleighParams rp;
    double worst = 0.0;
    auto check = [&](double ks, double limit, const std::string& what) {
        worst = std::max(worst, ks / limit);
        o.require(ks < limit, what + " KS = " + fmt(ks));
    };

    std::uint64_t seed = 6000;
    for (const auto& row : default_timeline().states()) {
        RandomStream rng(seed++, 0);
        std::vector<double> xs(1'000'000);
        for (auto& x : xs) {
            x = sample_sat_power(row, rng);
        }
        check(oracle::ks_statistic(xs, [&](double h) { return sat_power_cdf(h, row, spec); }), 0.002,
              "satellite power t=" + fmt(row.t));
    }
    {
        RandomStream rng(seed++, 0);
        std::vector<double> xs(1'000'000);
        for (auto& x : xs) {
            x = sample_bs_power(rp, rng);
        }
        check(oracle::ks_statistic(xs, [&](double h) { return bs_power_cdf(h, rp); }), 0.002, "terrestrial power");
    }
    {
        NetworkConfig cfg;
        cfg.n_sats = 1000.0;
        RandomStream rng(seed++, 0);
        std::vector<double> xs(100'000);
        for (auto& x : xs) {
            x = sample_sat_nearest(cfg, rng);
        }
        check(oracle::ks_statistic(xs, [&](double r) { return sat_nearest_cdf(r, cfg); }), 0.006, "satellite distance");
    }
    {
        NetworkConfig cfg;
        cfg.n_sats = 100.0;
        RandomStream a(seed, 0);
        RandomStream b(seed++, 1);
        std::vector<double> spatial(100'000);
        std::vector<double> inverse(100'000);
        for (std::size_t i = 0; i < spatial.size(); ++i) {
            spatial[i] = sample_sat_nearest(cfg, a, SamplingMode::Spatial);
            inverse[i] = sample_sat_nearest(cfg, b, SamplingMode::InverseCdf);
        }
        check(oracle::ks_two_sample(spatial, inverse), 0.009, "spatial vs inverse-CDF distance");
    }
    {
        NetworkConfig cfg;
        RandomStream rng(seed++, 0);
        std::vector<double> xs(100'000);
        for (auto& x : xs) {
            x = sample_bs_nearest(cfg, rng);
        }
        check(oracle::ks_statistic(xs, [&](double r) { return bs_nearest_cdf(r, cfg); }), 0.006, "base-station distance");
    }
    {
        const auto row = timeline_lookup(default_timeline(), 52.0);
        RandomStream rng(seed++, 0);
        std::vector<double> xs(1'000'000);
        for (auto& x : xs) {
            x = sample_sat_power(row, rng) / sample_bs_power(rp, rng);
        }
        check(oracle::ks_statistic(xs, [&](double h) { return fading_ratio_cdf(h, row, rp, spec); }), 0.002,
              "fading ratio");
    }
    if (o.pass) {
        o.detail = "11 samples, max KS / threshold = " + fmt(worst);
    }
    return o;
}

// Integral over [0, inf) in decades from lo_edge to last, then a tail.
double decade_integral(const RealFunction& f, double lo_edge, double last, const QuadratureSpec& spec) {
    double total = integrate_finite(f, 0.0, lo_edge, spec).value;
    for (double a = lo_edge; a < last; a *= 10.0) {
        total += integrate_finite(f, a, a * 10.0, spec).value;
    }
    return total + integrate_semi_infinite(f, last, spec, last).value;
}

Outcome numeric_kernels() {
    Outcome o;
    const QuadratureSpec spec;
    const RayleighParams rp;

    double worst_cf = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double n = std::pow(10.0, 4.0 * i / 19.0);
        for (int j = 0; j < 20; ++j) {
            const double d = std::pow(10.0, -3.0 + 9.0 * j / 19.0);
            const double via_cf = 1.0 / (1.0 + d / cf_w(n, d, spec));
            worst_cf = std::max(worst_cf, std::abs(via_cf - kummer_ratio_series(n, d, spec)));
        }
    }
    o.require(worst_cf < 1e-9, "series vs continued fraction " + fmt(worst_cf));

    double worst_mass = 0.0;
    const double unit = 1.0 / rp.mean_power();
    for (const auto& row : default_timeline().states()) {
        const double sat = decade_integral([&](double h) { return sat_power_pdf(h, row, spec); }, 1e-8, 1e3, spec);
        const double ratio = decade_integral([&](double h) { return fading_ratio_pdf(h, row, rp, spec); }, 1e-6 * unit,
                                             1e6 * unit, spec);
        worst_mass = std::max({worst_mass, std::abs(sat - 1.0), std::abs(ratio - 1.0)});
    }
    for (double n : {1.0, 50.0, 1e3, 1e4}) {
        NetworkConfig cfg;
        cfg.n_sats = n;
        const double far = 2.0 * cfg.r_e + cfg.r_s;
        double mass = 0.0;
        double a = cfg.r_s;
        for (double b = cfg.r_s + 1.0; a < far; b = std::min(far, cfg.r_s + (b - cfg.r_s) * 4.0)) {
            mass += integrate_finite([&](double r) { return sat_nearest_pdf(r, cfg); }, a, b, spec).value;
            a = b;
        }
        worst_mass = std::max(worst_mass, std::abs(mass - 1.0));
    }
    o.require(worst_mass < 1e-6, "density normalisation " + fmt(worst_mass));

    double worst_fd = 0.0;
    for (const auto& row : default_timeline().states()) {
        for (double g : {0.5, 1.0, 5.0}) {
            const double h = g * unit;
            const double step = 1e-4 * h;
            const double fd =
                (fading_ratio_cdf(h + step, row, rp, spec) - fading_ratio_cdf(h - step, row, rp, spec)) / (2.0 * step);
            const double pdf = fading_ratio_pdf(h, row, rp, spec);
            worst_fd = std::max(worst_fd, std::abs(fd - pdf) / pdf);
        }
    }
    o.require(worst_fd < 1e-6, "ratio density vs CDF derivative " + fmt(worst_fd));

    if (o.pass) {
        o.detail = "grid " + fmt(worst_cf) + ", normalisation " + fmt(worst_mass) + ", derivative " + fmt(worst_fd);
    }
    return o;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct GoldenRun {
    std::string name;
    std::vector<std::string> args;  // output path appended
};

const std::vector<GoldenRun>& golden_runs() {
    static const std::vector<GoldenRun> runs{
        {"validate_fig1.json",
         {"validate", (kSource / "figures" / "fig1.toml").string(), "--trials", "200000", "--seed", "77"}},
        {"sweep_fig1.csv",
         {"sweep", (kSource / "figures" / "fig1.toml").string(), "--vary", "t", "0", "130", "6", "--vary", "N", "1000",
          "10000", "2"}},
    };
    return runs;
}

// Runs the tool into `dir` and returns the exit code.
int run_golden(const GoldenRun& g, const fs::path& dir) {
    auto args = g.args;
    args.push_back("-o");
    args.push_back((dir / g.name).string());
    std::ostringstream out;
    std::ostringstream err;
    return run_cli(args, out, err);
}

Outcome determinism() {
    Outcome o;
    ::setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
    const fs::path base = fs::temp_directory_path() / "leo_offload_acceptance";
    fs::remove_all(base);
    const fs::path first = base / "first";
    const fs::path second = base / "second";
    fs::create_directories(first);
    fs::create_directories(second);
    for (const auto& g : golden_runs()) {
        o.require(run_golden(g, first) == kExitOk && run_golden(g, second) == kExitOk, g.name + " did not exit 0");
        const std::string a = read_file(first / g.name);
        const std::string b = read_file(second / g.name);
        o.require(!a.empty() && a == b, g.name + " differs between runs");
        const std::string ma = read_file(first / (g.name + ".manifest.json"));
        std::string mb = read_file(second / (g.name + ".manifest.json"));
        const auto pos = mb.find(second.string());
        if (pos != std::string::npos) {
            mb.replace(pos, second.string().size(), first.string());
        }
        o.require(ma == mb, g.name + " manifest differs between runs");
        const fs::path golden = kSource / "tests" / "golden" / g.name;
        o.require(fs::exists(golden) && read_file(golden) == a, g.name + " differs from " + golden.string());
    }
    ::unsetenv("SOURCE_DATE_EPOCH");
    if (o.pass) {
        o.detail = std::to_string(golden_runs().size()) + " outputs byte-identical across runs and with tests/golden";
    }
    return o;
}

int write_golden() {
    const fs::path dir = kSource / "tests" / "golden";
    fs::create_directories(dir);
    for (const auto& g : golden_runs()) {
        if (run_golden(g, dir) != kExitOk) {
            std::cerr << "failed: " << g.name << "\n";
            return 1;
        }
        fs::remove(dir / (g.name + ".manifest.json"));
        std::cout << "wrote " << (dir / g.name).string() << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1 && std::string(argv[1]) == "--write-golden") {
        return write_golden();
    }
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {"analytic vs Monte Carlo offloading probability", oracle_equivalence},
        {"offloading probability over the pass", pass_curve},
        {"offloading probability grows with the constellation", constellation_growth},
        {"empty-satellite probability forms agree", empty_probability_consistency},
        {"constellation planner", planner_behaviour},
        {"sampler distributions", sampler_suite},
        {"numeric kernels", numeric_kernels},
        {"deterministic outputs", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("threw: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failures += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << criteria[i].name << " ("
                  << o.detail << ") [" << fmt(secs) << " s]" << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
