#pragma once

#include "leo/channel.hpp"
#include "leo/errors.hpp"
#include "leo/geometry.hpp"
#include "leo/numerics.hpp"
#include "leo/planner.hpp"
#include "leo/sim.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace leo {

/// Bad or unreadable configuration. `line` is 0 when no single line is at fault.
class ConfigError : public Error {
public:
    ConfigError(const std::string& file, std::size_t line, const std::string& field, const std::string& what);

    const std::string& file() const { return file_; }
    std::size_t line() const { return line_; }
    const std::string& field() const { return field_; }

private:
    std::string file_;
    std::size_t line_;
    std::string field_;
};

/// Channel selection: a time on a timeline, or explicit state parameters.
struct ChannelSelection {
    std::optional<double> t;
    ChannelTimeline timeline = default_timeline();
    ChannelState state{};  ///< used when t is empty
};

struct RunConfig {
    NetworkConfig network;
    ChannelSelection channel;
    PlannerConfig planner;
    SimConfig sim;
    QuadratureSpec quadrature;

    /// Channel state at the configured time (or at `t` when given).
    ChannelState channel_state(std::optional<double> t = std::nullopt) const;
};

/// Environment variable naming the directory searched for relative config paths.
inline constexpr const char* kConfigDirEnv = "LEO_OFFLOAD_CONFIG_DIR";

/// Resolves `path` as given, then under $LEO_OFFLOAD_CONFIG_DIR, each time
/// also trying a ".toml" suffix. Throws ConfigError when nothing exists.
std::filesystem::path resolve_config_path(const std::string& path);

/// Reads a config file. Sections [network], [channel], [planner], [sim] and
/// [quadrature] are optional; every key must be a known field. A relative
/// `timeline` path in [channel] is taken relative to the config file.
RunConfig load_config(const std::filesystem::path& path);

/// Reads a timeline file with a [timeline] section of equal-length arrays
/// t, p_f, k, mu_db, sigma_db and an optional interpolation_mode
/// ("exact" or "linear").
ChannelTimeline load_timeline(const std::filesystem::path& path);

/// Canonical text of the resolved configuration; equal configs give equal text.
std::string canonical_config(const RunConfig& rc);

/// 64-bit FNV-1a digest as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace leo
