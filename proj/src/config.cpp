#include "leo/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

namespace leo {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

ConfigError::ConfigError(const std::string& file, std::size_t line, const std::string& field,
                         const std::string& what)
    : Error(file + (line != 0 ? ":" + std::to_string(line) : std::string()) +
            (field.empty() ? std::string() : ": " + field) + ": " + what),
      file_(file),
      line_(line),
      field_(field) {}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

// Parsed INI tree plus the line of every "section.key" for diagnostics.
class Document {
public:
    explicit Document(const fs::path& path) : name_(path.string()) {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            throw ConfigError(name_, 0, "", "cannot open file");
        }
        std::stringstream buf;
        buf << in.rdbuf();
        text_ = buf.str();
        std::istringstream stream(text_);
        try {
            pt::ini_parser::read_ini(stream, tree_);
        } catch (const pt::ini_parser_error& e) {
            throw ConfigError(name_, e.line(), "", e.message());
        }
        index_lines();
    }

    const pt::ptree& tree() const { return tree_; }
    const std::string& name() const { return name_; }

    std::size_t line_of(const std::string& field) const {
        const auto it = lines_.find(field);
        return it == lines_.end() ? 0 : it->second;
    }

    [[noreturn]] void fail(const std::string& field, const std::string& what) const {
        throw ConfigError(name_, line_of(field), field, what);
    }

private:
    void index_lines() {
        std::istringstream stream(text_);
        std::string line;
        std::string section;
        for (std::size_t no = 1; std::getline(stream, line); ++no) {
            const std::string t = trim(line);
            if (t.empty() || t[0] == ';' || t[0] == '#') {
                continue;
            }
            if (t.front() == '[' && t.back() == ']') {
                section = trim(std::string_view(t).substr(1, t.size() - 2));
                lines_[section] = no;
                continue;
            }
            const auto eq = t.find('=');
            if (eq != std::string::npos) {
                const std::string key = trim(std::string_view(t).substr(0, eq));
                lines_[section.empty() ? key : section + "." + key] = no;
            }
        }
    }

    std::string name_;
    std::string text_;
    pt::ptree tree_;
    std::map<std::string, std::size_t> lines_;
};

double parse_number(const Document& doc, const std::string& field, const std::string& raw) {
    const std::string s = trim(raw);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
        doc.fail(field, "expected a number, got '" + s + "'");
    }
    return v;
}

std::uint64_t parse_count(const Document& doc, const std::string& field, const std::string& raw) {
    const std::string s = trim(raw);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && ptr == s.data() + s.size()) {
        return v;
    }
    const double d = parse_number(doc, field, s);
    if (d < 0.0 || d != std::floor(d) || d >= 0x1p64) {
        doc.fail(field, "expected a non-negative integer, got '" + s + "'");
    }
    return static_cast<std::uint64_t>(d);
}

std::string parse_string(const Document& doc, const std::string& field, const std::string& raw) {
    const std::string s = trim(raw);
    if (s.size() < 2 || s.front() != '"' || s.back() != '"') {
        doc.fail(field, "expected a quoted string");
    }
    return s.substr(1, s.size() - 2);
}

std::vector<double> parse_array(const Document& doc, const std::string& field, const std::string& raw) {
    const std::string s = trim(raw);
    if (s.size() < 2 || s.front() != '[' || s.back() != ']') {
        doc.fail(field, "expected an array like [1, 2, 3]");
    }
    std::vector<double> out;
    std::istringstream items(s.substr(1, s.size() - 2));
    std::string item;
    while (std::getline(items, item, ',')) {
        if (trim(item).empty() && items.eof()) {
            break;
        }
        out.push_back(parse_number(doc, field, item));
    }
    return out;
}

using Setter = std::function<void(const std::string& field, const std::string& value)>;

// Applies each key of `section` through its setter; unknown keys are errors.
void apply_section(const Document& doc, const std::string& section, const std::map<std::string, Setter>& setters) {
    const auto child = doc.tree().get_child_optional(section);
    if (!child) {
        return;
    }
    for (const auto& [key, node] : *child) {
        const std::string field = section + "." + key;
        if (!node.empty()) {
            doc.fail(field, "unexpected nesting");
        }
        const auto it = setters.find(key);
        if (it == setters.end()) {
            doc.fail(field, "unknown key");
        }
        it->second(field, node.data());
    }
}

InterpolationMode parse_mode(const Document& doc, const std::string& field, const std::string& raw) {
    const std::string s = parse_string(doc, field, raw);
    if (s == "exact") {
        return InterpolationMode::ExactMatchOnly;
    }
    if (s == "linear") {
        return InterpolationMode::Linear;
    }
    doc.fail(field, "expected \"exact\" or \"linear\"");
}


nlohmann::ordered_json nullable(const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

ChannelState RunConfig::channel_state(std::optional<double> t) const {
    if (t) {
        return timeline_lookup(channel.timeline, *t);
    }
    if (channel.t) {
        return timeline_lookup(channel.timeline, *channel.t);
    }
    return channel.state;
}

fs::path resolve_config_path(const std::string& path) {
    std::vector<fs::path> candidates{path, path + ".toml"};
    const fs::path given(path);
    if (const char* dir = std::getenv(kConfigDirEnv); dir != nullptr && *dir != '\0' && given.is_relative()) {
        candidates.emplace_back(fs::path(dir) / given);
        candidates.emplace_back(fs::path(dir) / (path + ".toml"));
    }
    for (const auto& c : candidates) {
        std::error_code ec;
        if (fs::is_regular_file(c, ec)) {
            return c;
        }
    }
    throw ConfigError(path, 0, "", "config file not found (also searched $" + std::string(kConfigDirEnv) + ")");
}

ChannelTimeline load_timeline(const fs::path& path) {
    const Document doc(path);
    for (const auto& [key, node] : doc.tree()) {
        if (key != "timeline") {
            doc.fail(key, "unknown section or key");
        }
    }
    std::map<std::string, std::vector<double>> columns;
    InterpolationMode mode = InterpolationMode::ExactMatchOnly;
    std::map<std::string, Setter> setters;
    for (const char* name : {"t", "p_f", "k", "mu_db", "sigma_db"}) {
        setters[name] = [&, name](const std::string& f, const std::string& v) {
            columns[name] = parse_array(doc, f, v);
        };
    }
    setters["interpolation_mode"] = [&](const std::string& f, const std::string& v) { mode = parse_mode(doc, f, v); };
    apply_section(doc, "timeline", setters);

    for (const char* name : {"t", "p_f", "k", "mu_db", "sigma_db"}) {
        if (!columns.count(name)) {
            doc.fail(std::string("timeline.") + name, "missing column");
        }
        if (columns[name].size() != columns["t"].size()) {
            doc.fail(std::string("timeline.") + name, "column length differs from timeline.t");
        }
    }
    std::vector<ChannelState> states;
    for (std::size_t i = 0; i < columns["t"].size(); ++i) {
        states.push_back({columns["t"][i], columns["p_f"][i], columns["k"][i], columns["mu_db"][i],
                          columns["sigma_db"][i]});
    }
    try {
        return ChannelTimeline(std::move(states), mode);
    } catch (const DomainError& e) {
        throw ConfigError(doc.name(), doc.line_of("timeline"), "timeline", e.what());
    }
}

RunConfig load_config(const fs::path& path) {
    const Document doc(path);
    RunConfig rc;

    static const std::vector<std::string> kSections{"network", "channel", "planner", "sim", "quadrature"};
    for (const auto& [key, node] : doc.tree()) {
        const bool section = std::find(kSections.begin(), kSections.end(), key) != kSections.end();
        if (section) {
            continue;
        }
        if (key == "version" && node.empty()) {
            if (parse_number(doc, key, node.data()) != 1.0) {
                doc.fail(key, "unsupported config version");
            }
            continue;
        }
        doc.fail(key, "unknown section or key");
    }

    auto num = [&](double& slot) {
        return [&doc, &slot](const std::string& f, const std::string& v) { slot = parse_number(doc, f, v); };
    };
    auto opt = [&](std::optional<double>& slot) {
        return [&doc, &slot](const std::string& f, const std::string& v) { slot = parse_number(doc, f, v); };
    };
    auto count = [&](std::uint64_t& slot) {
        return [&doc, &slot](const std::string& f, const std::string& v) { slot = parse_count(doc, f, v); };
    };
    auto size = [&](std::size_t& slot) {
        return [&doc, &slot](const std::string& f, const std::string& v) { slot = parse_count(doc, f, v); };
    };

    NetworkConfig& n = rc.network;
    apply_section(doc, "network",
                  {{"r_e", num(n.r_e)},
                   {"r_s", num(n.r_s)},
                   {"n_sats", num(n.n_sats)},
                   {"b_intensity", num(n.b_intensity)},
                   {"u_intensity", num(n.u_intensity)},
                   {"p_sat_tx", num(n.p_sat_tx)},
                   {"p_bs_tx", num(n.p_bs_tx)},
                   {"eta", num(n.eta)},
                   {"sigma", num(n.sigma)}});

    ChannelSelection& ch = rc.channel;
    std::optional<double> p_f, k, mu_db, sigma_db;
    std::optional<std::string> timeline_path;
    std::optional<InterpolationMode> mode;
    apply_section(doc, "channel",
                  {{"t", opt(ch.t)},
                   {"timeline", [&](const std::string& f, const std::string& v) { timeline_path = parse_string(doc, f, v); }},
                   {"interpolation_mode", [&](const std::string& f, const std::string& v) { mode = parse_mode(doc, f, v); }},
                   {"p_f", opt(p_f)},
                   {"k", opt(k)},
                   {"mu_db", opt(mu_db)},
                   {"sigma_db", opt(sigma_db)}});
    const bool explicit_state = p_f || k || mu_db || sigma_db;
    if (explicit_state && (ch.t || timeline_path)) {
        doc.fail("channel", "give either t (with an optional timeline) or p_f, k, mu_db, sigma_db, not both");
    }
    if (explicit_state) {
        for (const auto& [name, v] : {std::pair{"p_f", p_f}, {"k", k}, {"mu_db", mu_db}, {"sigma_db", sigma_db}}) {
            if (!v) {
                doc.fail(std::string("channel.") + name, "missing; explicit channel states need all four fields");
            }
        }
        ch.state = {0.0, *p_f, *k, *mu_db, *sigma_db};
        try {
            ch.state.validate();
        } catch (const DomainError& e) {
            doc.fail("channel", e.what());
        }
    } else if (!ch.t) {
        ch.t = 0.0;
    }
    if (timeline_path) {
        fs::path tp(*timeline_path);
        if (tp.is_relative()) {
            tp = path.parent_path() / tp;
        }
        ch.timeline = load_timeline(tp);
    }
    if (mode) {
        ch.timeline = ch.timeline.with_mode(*mode);
    }
    if (ch.t) {
        try {
            timeline_lookup(ch.timeline, *ch.t);
        } catch (const Error& e) {
            doc.fail("channel.t", e.what());
        }
    }

    PlannerConfig& pc = rc.planner;
    apply_section(doc, "planner",
                  {{"epsilon", num(pc.epsilon)},
                   {"c", num(pc.c)},
                   {"region_area", opt(pc.region_area)},
                   {"n_lo", opt(pc.n_lo)},
                   {"n_hi", opt(pc.n_hi)},
                   {"root_tol", num(pc.root_tol)}});

    SimConfig& sc = rc.sim;
    apply_section(doc, "sim",
                  {{"trials", count(sc.trials)},
                   {"seed", count(sc.seed)},
                   {"batch_size", count(sc.batch_size)},
                   {"threads",
                    [&](const std::string& f, const std::string& v) {
                        sc.threads = static_cast<unsigned>(parse_count(doc, f, v));
                    }},
                   {"mode", [&](const std::string& f, const std::string& v) {
                        const std::string s = parse_string(doc, f, v);
                        if (s == "inverse-cdf") {
                            sc.mode = SamplingMode::InverseCdf;
                        } else if (s == "spatial") {
                            sc.mode = SamplingMode::Spatial;
                        } else {
                            doc.fail(f, "expected \"inverse-cdf\" or \"spatial\"");
                        }
                    }}});

    QuadratureSpec& q = rc.quadrature;
    apply_section(doc, "quadrature",
                  {{"rel_tol", num(q.rel_tol)},
                   {"abs_tol", num(q.abs_tol)},
                   {"max_subdivisions", size(q.max_subdivisions)},
                   {"series_max_terms", size(q.series_max_terms)},
                   {"series_term_tol", num(q.series_term_tol)},
                   {"cf_max_iters", size(q.cf_max_iters)},
                   {"cf_tol", num(q.cf_tol)}});

    // Range checks, reported against the owning section.
    auto check = [&](const char* section, auto&& fn) {
        try {
            fn();
        } catch (const DomainError& e) {
            doc.fail(section, e.what());
        }
    };
    check("network", [&] { rc.network.validate(); });
    check("planner", [&] { rc.planner.validate(); });
    check("sim", [&] { rc.sim.validate(); });
    check("quadrature", [&] { rc.quadrature.validate(); });
    return rc;
}

std::string canonical_config(const RunConfig& rc) {
    nlohmann::ordered_json j;
    const NetworkConfig& n = rc.network;
    j["network"] = {{"r_e", n.r_e},           {"r_s", n.r_s},           {"n_sats", n.n_sats},
                    {"b_intensity", n.b_intensity}, {"u_intensity", n.u_intensity}, {"p_sat_tx", n.p_sat_tx},
                    {"p_bs_tx", n.p_bs_tx},   {"eta", n.eta},           {"sigma", n.sigma}};
    auto state_json = [](const ChannelState& s) {
        return nlohmann::ordered_json{{"t", s.t}, {"p_f", s.p_f}, {"k", s.k}, {"mu_db", s.mu_db}, {"sigma_db", s.sigma_db}};
    };
    nlohmann::ordered_json ch;
    if (rc.channel.t) {
        ch["t"] = *rc.channel.t;
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (const auto& s : rc.channel.timeline.states()) {
            rows.push_back(state_json(s));
        }
        ch["timeline"] = rows;
        ch["interpolation_mode"] = rc.channel.timeline.mode() == InterpolationMode::Linear ? "linear" : "exact";
    } else {
        ch["state"] = state_json(rc.channel.state);
    }
    j["channel"] = ch;
    const PlannerConfig& p = rc.planner;
    j["planner"] = {{"epsilon", p.epsilon},
                    {"c", p.c},
                    {"region_area", nullable(p.region_area)},
                    {"n_lo", nullable(p.n_lo)},
                    {"n_hi", nullable(p.n_hi)},
                    {"root_tol", p.root_tol}};
    const SimConfig& s = rc.sim;
    j["sim"] = {{"trials", s.trials},
                {"seed", s.seed},
                {"mode", s.mode == SamplingMode::Spatial ? "spatial" : "inverse-cdf"},
                {"batch_size", s.batch_size}};
    const QuadratureSpec& q = rc.quadrature;
    j["quadrature"] = {{"rel_tol", q.rel_tol},
                       {"abs_tol", q.abs_tol},
                       {"max_subdivisions", q.max_subdivisions},
                       {"series_max_terms", q.series_max_terms},
                       {"series_term_tol", q.series_term_tol},
                       {"cf_max_iters", q.cf_max_iters},
                       {"cf_tol", q.cf_tol}};
    return j.dump();
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = kHex[h & 0xF];
        h >>= 4;
    }
    return out;
}

}  // namespace leo
