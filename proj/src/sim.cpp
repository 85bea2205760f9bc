#include "leo/sim.hpp"

#include "leo/errors.hpp"
#include "leo/random.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>
#include <vector>

namespace leo {

void SimConfig::validate() const {
    if (trials < 1) {
        throw DomainError("SimConfig: trials must be >= 1");
    }
    if (batch_size < 1) {
        throw DomainError("SimConfig: batch_size must be >= 1");
    }
}

namespace {

// Runs body(batch_index, first_trial, count) over all batches and returns the
// per-batch results in batch order.
template <class Body>
std::vector<std::uint64_t> run_batches(std::uint64_t total, std::uint64_t batch_size, unsigned threads,
                                       const Body& body) {
    const std::uint64_t n_batches = (total + batch_size - 1) / batch_size;
    std::vector<std::uint64_t> counts(n_batches, 0);
    unsigned workers = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, n_batches));

    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        try {
            for (std::uint64_t b = next++; b < n_batches; b = next++) {
                const std::uint64_t count = std::min(batch_size, total - b * batch_size);
                counts[b] = body(b, count);
            }
        } catch (...) {
            const std::lock_guard lock(failure_mutex);
            if (!failure) {
                failure = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned i = 0; i < workers; ++i) {
            pool.emplace_back(work);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return counts;
}

SimEstimate finish(std::uint64_t hits, std::uint64_t trials, std::chrono::steady_clock::time_point start) {
    SimEstimate est;
    est.trials = trials;
    est.estimate = static_cast<double>(hits) / static_cast<double>(trials);
    est.std_error = std::sqrt(est.estimate * (1.0 - est.estimate) / static_cast<double>(trials));
    est.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return est;
}

std::array<double, 3> unit_sphere_point(RandomStream& rng) {
    const double z = 2.0 * rng.uniform() - 1.0;
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {rho * std::cos(phi), rho * std::sin(phi), z};
}

}  // namespace

SimEstimate estimate_ps(const NetworkConfig& cfg, const ChannelState& cs, const SimConfig& sc) {
    cfg.validate();
    cs.validate();
    sc.validate();
    const auto start = std::chrono::steady_clock::now();
    if (cfg.p_sat_tx == 0.0) {
        return finish(0, sc.trials, start);
    }
    const RayleighParams rp = cfg.rayleigh();
    const auto counts = run_batches(sc.trials, sc.batch_size, sc.threads, [&](std::uint64_t b, std::uint64_t n) {
        RandomStream rng(sc.seed, b);
        std::uint64_t hits = 0;
        for (std::uint64_t i = 0; i < n; ++i) {
            const double r_s = sample_sat_nearest(cfg, rng, sc.mode);
            const double r_b = sample_bs_nearest(cfg, rng);
            const double h_s = sample_sat_power(cs, rng);
            const double h_b = sample_bs_power(rp, rng);
            // Cross-multiplied to avoid overflow in r^-eta.
            if (cfg.p_sat_tx * h_s * std::pow(r_b, cfg.eta) >= cfg.p_bs_tx * h_b * std::pow(r_s, cfg.eta)) {
                ++hits;
            }
        }
        return hits;
    });
    std::uint64_t hits = 0;
    for (const auto c : counts) {
        hits += c;
    }
    return finish(hits, sc.trials, start);
}

SimEstimate estimate_empty_fraction(double n, double u_s, const NetworkConfig& cfg, const SimConfig& sc,
                                    double c) {
    cfg.validate();
    sc.validate();
    if (!(n >= 2.0) || !(u_s >= 0.0) || !(c > 0.0)) {
        throw DomainError("estimate_empty_fraction: requires n >= 2, u_s >= 0, c > 0");
    }
    const auto start = std::chrono::steady_clock::now();
    const auto sats = static_cast<std::size_t>(std::llround(n));
    const double radius = cfg.shell_radius();
    const double mean_users = c * u_s * radius * radius;
    const std::uint64_t trials = sc.trials * sats;
    if (mean_users == 0.0) {
        return finish(trials, trials, start);
    }

    const auto counts = run_batches(sc.trials, sc.batch_size, sc.threads, [&](std::uint64_t b, std::uint64_t reps) {
        RandomStream rng(sc.seed, b);
        std::vector<std::array<double, 3>> pos(sats);
        std::vector<char> occupied(sats);
        std::uint64_t empty = 0;
        for (std::uint64_t r = 0; r < reps; ++r) {
            for (auto& p : pos) {
                p = unit_sphere_point(rng);
            }
            std::fill(occupied.begin(), occupied.end(), 0);
            const std::uint64_t users = rng.poisson(mean_users);
            for (std::uint64_t u = 0; u < users; ++u) {
                const auto q = unit_sphere_point(rng);
                std::size_t best = 0;
                double best_dot = -2.0;
                for (std::size_t j = 0; j < sats; ++j) {
                    const double dot = q[0] * pos[j][0] + q[1] * pos[j][1] + q[2] * pos[j][2];
                    if (dot > best_dot) {
                        best_dot = dot;
                        best = j;
                    }
                }
                occupied[best] = 1;
            }
            empty += static_cast<std::uint64_t>(std::count(occupied.begin(), occupied.end(), 0));
        }
        return empty;
    });
    std::uint64_t empty = 0;
    for (const auto v : counts) {
        empty += v;
    }
    return finish(empty, trials, start);
}

SimEstimate estimate_empty_fraction(const NetworkConfig& cfg, const ChannelState& cs, const SimConfig& sc,
                                    const QuadratureSpec& spec) {
    return estimate_empty_fraction(cfg.n_sats, offloaded_intensity(cfg, cs, spec), cfg, sc);
}

}  // namespace leo
