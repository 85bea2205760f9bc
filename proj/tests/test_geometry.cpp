#include "leo/errors.hpp"
#include "leo/geometry.hpp"
#include "leo/random.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace leo;

namespace {

// (R_s / R_b)^eta <= r written as an average over the satellite distance:
// int P(R_b >= r^(-1/eta) r0) f_Rs(r0) dr0.
double ratio_cdf_by_distance(double r, const NetworkConfig& cfg) {
    const double lo = cfg.r_s;
    const double hi = 2.0 * cfg.r_e + cfg.r_s;
    const double scale = std::pow(r, -1.0 / cfg.eta);
    return oracle::simpson(
        [&](double r0) {
            const double x = scale * r0;
            const double cap = std::max(0.0, 1.0 - (r0 * r0 - lo * lo) / (4.0 * cfg.r_e * cfg.shell_radius()));
            const double pdf = cfg.n_sats * std::pow(cap, cfg.n_sats - 1.0) * r0 / (2.0 * cfg.r_e * cfg.shell_radius());
            return std::exp(-cfg.b_intensity * std::numbers::pi * x * x) * pdf;
        },
        lo, hi, 400000);
}

}  // namespace

TEST_CASE("network config validation") {
    NetworkConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.eta = 2.0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = {};
    cfg.b_intensity = 0.0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = {};
    cfg.r_s = -1.0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = {};
    cfg.p_sat_tx = 0.0;
    cfg.u_intensity = 0.0;
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("nearest-satellite density") {
    const QuadratureSpec spec;
    for (double n : {1.0, 2.0, 50.0, 1000.0, 1e4}) {
        NetworkConfig cfg;
        cfg.n_sats = n;
        const double far = 2.0 * cfg.r_e + cfg.r_s;
        double mass = 0.0;
        // Pieces follow the geometric spread of the mass near r_s for large N.
        double a = cfg.r_s;
        for (double b = cfg.r_s + 1.0; a < far; b = std::min(far, cfg.r_s + (b - cfg.r_s) * 4.0)) {
            mass += integrate_finite([&](double r) { return sat_nearest_pdf(r, cfg); }, a, b, spec).value;
            a = b;
        }
        CAPTURE(n);
        CHECK(std::abs(mass - 1.0) < 1e-9);
        if (n >= 2.0) {
            CHECK(sat_nearest_pdf(far, cfg) == 0.0);
        }
    }
    NetworkConfig cfg;
    CHECK_THROWS_AS(sat_nearest_pdf(cfg.r_s - 1.0, cfg), DomainError);
    CHECK_THROWS_AS(sat_nearest_pdf(2.0 * cfg.r_e + cfg.r_s + 1.0, cfg), DomainError);
}

TEST_CASE("single satellite median distance") {
    NetworkConfig cfg;
    cfg.n_sats = 1.0;
    cfg.r_s = 500.0;
    const double r = std::sqrt(cfg.r_s * cfg.r_s + 4.0 * cfg.r_e * cfg.shell_radius() * 0.5);
    CHECK(sat_nearest_cdf(r, cfg) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(sat_nearest_cdf(cfg.r_s, cfg) == 0.0);
    CHECK(sat_nearest_cdf(2.0 * cfg.r_e + cfg.r_s, cfg) == 1.0);
}

TEST_CASE("nearest-satellite sampler, inverse-CDF mode") {
    NetworkConfig cfg;
    cfg.n_sats = 1000.0;
    RandomStream rng(21, 0);
    std::vector<double> xs(100'000);
    for (auto& x : xs) {
        x = sample_sat_nearest(cfg, rng);
        REQUIRE(x >= cfg.r_s);
        REQUIRE(x <= 2.0 * cfg.r_e + cfg.r_s);
    }
    CHECK(oracle::ks_statistic(xs, [&](double r) { return sat_nearest_cdf(r, cfg); }) < 0.006);
}

TEST_CASE("nearest-satellite sampler, spatial mode matches inverse-CDF mode") {
    NetworkConfig cfg;
    cfg.n_sats = 100.0;
    RandomStream a(22, 0);
    RandomStream b(22, 1);
    std::vector<double> spatial(100'000);
    std::vector<double> inverse(100'000);
    for (std::size_t i = 0; i < spatial.size(); ++i) {
        spatial[i] = sample_sat_nearest(cfg, a, SamplingMode::Spatial);
        inverse[i] = sample_sat_nearest(cfg, b, SamplingMode::InverseCdf);
        REQUIRE(spatial[i] >= cfg.r_s - 1e-9);
        REQUIRE(spatial[i] <= 2.0 * cfg.r_e + cfg.r_s + 1e-9);
    }
    CHECK(oracle::ks_two_sample(spatial, inverse) < 0.009);
}

TEST_CASE("nearest base station") {
    NetworkConfig cfg;
    cfg.b_intensity = 0.5;
    CHECK(bs_nearest_cdf(0.0, cfg) == 0.0);
    CHECK(bs_nearest_cdf(1.0, cfg) == doctest::Approx(1.0 - std::exp(-std::numbers::pi / 2.0)).epsilon(1e-14));
    CHECK_THROWS_AS(bs_nearest_cdf(-0.1, cfg), DomainError);
    for (int i = 1; i <= 9; ++i) {
        const double p = 0.1 * i;
        const double r = std::sqrt(-std::log(1.0 - p) / (std::numbers::pi * cfg.b_intensity));
        CHECK(bs_nearest_cdf(r, cfg) == doctest::Approx(p).epsilon(1e-13));
    }
    RandomStream rng(23, 0);
    std::vector<double> xs(100'000);
    for (auto& x : xs) {
        x = sample_bs_nearest(cfg, rng);
    }
    CHECK(oracle::ks_statistic(xs, [&](double r) { return bs_nearest_cdf(r, cfg); }) < 0.006);
}

TEST_CASE("distance-ratio CDF endpoints") {
    const QuadratureSpec spec;
    NetworkConfig cfg;
    CHECK(dist_ratio_cdf(0.0, cfg, spec) == 0.0);
    CHECK(dist_ratio_cdf(std::numeric_limits<double>::infinity(), cfg, spec) == 1.0);
    CHECK(std::abs(dist_ratio_cdf(1e40, cfg, spec) - 1.0) < 1e-6);
    CHECK(dist_ratio_cdf(1.0, cfg, spec) == 0.0);
    CHECK_THROWS_AS(dist_ratio_cdf(-1.0, cfg, spec), DomainError);
}

TEST_CASE("distance-ratio CDF against the distance average") {
    const QuadratureSpec spec;
    NetworkConfig single;
    single.n_sats = 1.0;
    for (double r : {1e6, 1e8, 1e10, 1e12}) {
        CAPTURE(r);
        CHECK(std::abs(dist_ratio_cdf(r, single, spec) - ratio_cdf_by_distance(r, single)) < 1e-9);
    }
    for (double n : {10.0, 100.0}) {
        NetworkConfig cfg;
        cfg.n_sats = n;
        cfg.b_intensity = 0.3;
        for (double r : {1e7, 1e8, 1e9, 1e10}) {
            CAPTURE(n);
            CAPTURE(r);
            CHECK(std::abs(dist_ratio_cdf(r, cfg, spec) - ratio_cdf_by_distance(r, cfg)) < 1e-7);
        }
    }
}

TEST_CASE("distance-ratio CDF monotonicity") {
    const QuadratureSpec spec;
    NetworkConfig cfg;
    for (double n : {1.0, 10.0, 1e3, 1e5}) {
        cfg.n_sats = n;
        double prev = 0.0;
        for (double r = 1e4; r < 1e16; r *= 3.0) {
            const double v = dist_ratio_cdf(r, cfg, spec);
            CHECK(v >= prev);
            CHECK(v <= 1.0);
            prev = v;
        }
    }
    for (double r : {1e7, 1e9, 1e11}) {
        double prev_n = 0.0;
        for (double n : {1.0, 10.0, 100.0, 1e3, 1e4, 1e5}) {
            cfg = {};
            cfg.n_sats = n;
            const double v = dist_ratio_cdf(r, cfg, spec);
            CHECK(v >= prev_n);
            prev_n = v;
        }
        double prev_b = 1.0;
        for (double b : {0.05, 0.1, 0.3, 0.5, 1.0, 2.0}) {
            cfg = {};
            cfg.b_intensity = b;
            const double v = dist_ratio_cdf(r, cfg, spec);
            CHECK(v <= prev_b);
            prev_b = v;
        }
    }
}

TEST_CASE("ratio exponents") {
    NetworkConfig cfg;
    const auto e = ratio_exponents(1.0, cfg);
    CHECK(e.shell_term == doctest::Approx(std::numbers::pi * cfg.b_intensity * cfg.r_s * cfg.r_s));
    CHECK(e.cap_term == doctest::Approx(4.0 * std::numbers::pi * cfg.b_intensity * cfg.r_e * cfg.shell_radius()));
}
