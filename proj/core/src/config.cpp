#include "gwquant/config.hpp"

#include <cerrno>
#include <cmath>
#include <limits>
#include <map>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <istream>

#include "gwquant/error.hpp"
#include "gwquant/io_util.hpp"

namespace gwquant {

OptimizerConfig TrainConfig::optimizer() const {
    OptimizerConfig config;
    config.n_restarts = restarts;
    config.seed = seed;
    config.center_targets = center_targets;
    return config;
}

void PipelineConfig::set_seed(std::uint64_t seed) {
    simulation.rng_seed = seed;
    train.seed = seed;
}

void PipelineConfig::validate() const {
    simulation.validate();
    require(!damage_grid.empty() && !load_grid.empty(), ErrorKind::invalid_argument, "grids must be non-empty");
    for (std::size_t i = 0; i < damage_grid.size(); ++i) {
        require(damage_grid[i] >= 0.0 && (i == 0 || damage_grid[i] > damage_grid[i - 1]),
                ErrorKind::invalid_argument, "damage_grid must be non-negative and strictly increasing");
    }
    for (std::size_t i = 0; i < load_grid.size(); ++i) {
        require(load_grid[i] >= 0.0 && (i == 0 || load_grid[i] > load_grid[i - 1]), ErrorKind::invalid_argument,
                "load_grid must be non-negative and strictly increasing");
    }
    require(di.settings.n_use >= 1, ErrorKind::invalid_argument, "di.n_use must be at least 1");
    require(train.restarts >= 0, ErrorKind::invalid_argument, "train.restarts must be non-negative");
    require(train.train_fraction > 0.0 && train.train_fraction < 1.0, ErrorKind::invalid_argument,
            "train.train_fraction must lie in (0, 1)");
    require(quantify.grid_refine >= 0, ErrorKind::invalid_argument, "quantify.grid_refine must be non-negative");
    require(quantify.options.low_confidence_threshold >= 0.0 && quantify.options.low_confidence_threshold <= 1.0,
            ErrorKind::invalid_argument, "quantify.low_confidence_threshold must lie in [0, 1]");
    require(quantify.options.ambiguity_ratio > 0.0, ErrorKind::invalid_argument,
            "quantify.ambiguity_ratio must be positive");
}

std::uint64_t parse_seed(const std::string& text, const std::string& where) {
    const std::string t = trim(text);
    require(!t.empty() && t.find_first_not_of("0123456789") == std::string::npos, ErrorKind::parse,
            where + ": seed must be a non-negative integer, got '" + t + "'");
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
    require(errno == 0 && end != nullptr && *end == '\0', ErrorKind::parse, where + ": seed out of range");
    return static_cast<std::uint64_t>(v);
}

namespace {

std::string unquote(const std::string& value) {
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
        return value.substr(1, value.size() - 2);
    }
    return value;
}

bool parse_bool(const std::string& value, const std::string& where) {
    if (value == "true") return true;
    if (value == "false") return false;
    fail(ErrorKind::parse, where + ": expected true or false, got '" + value + "'");
}

int parse_int(const std::string& value, const std::string& where) {
    const long long v = parse_integer(value, where);
    require(v >= std::numeric_limits<int>::min() && v <= std::numeric_limits<int>::max(), ErrorKind::parse,
            where + ": integer out of range");
    return static_cast<int>(v);
}

std::vector<double> parse_list(const std::string& value, const std::string& where) {
    std::string body = trim(value);
    if (body.size() >= 2 && body.front() == '[' && body.back() == ']') {
        body = body.substr(1, body.size() - 2);
    }
    std::vector<double> out;
    if (trim(body).empty()) {
        return out;
    }
    for (const std::string& item : split(body, ',')) {
        out.push_back(parse_real(trim(item), where));
    }
    return out;
}

/// Strips a trailing comment that is not inside quotes.
std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

}  // namespace

void apply_config_value(PipelineConfig& c, const std::string& key, const std::string& raw, const std::string& where) {
    const std::string value = unquote(trim(raw));
    const std::string w = where + ": " + key;
    auto real = [&] { return parse_real(value, w); };
    auto integer = [&] { return parse_int(value, w); };

    using Setter = std::function<void()>;
    const std::map<std::string, Setter> setters = {
        {"seed", [&] { c.set_seed(parse_seed(value, w)); }},
        {"simulation.center_frequency", [&] { c.simulation.center_frequency = real(); }},
        {"simulation.n_cycles", [&] { c.simulation.n_cycles = integer(); }},
        {"simulation.burst_amplitude", [&] { c.simulation.burst_amplitude = real(); }},
        {"simulation.sample_rate", [&] { c.simulation.sample_rate = real(); }},
        {"simulation.path_delay", [&] { c.simulation.path_delay = real(); }},
        {"simulation.damage_attenuation_coeff", [&] { c.simulation.damage_attenuation_coeff = real(); }},
        {"simulation.damage_delay_coeff", [&] { c.simulation.damage_delay_coeff = real(); }},
        {"simulation.load_delay_coeff", [&] { c.simulation.load_delay_coeff = real(); }},
        {"simulation.noise_floor_std", [&] { c.simulation.noise_floor_std = real(); }},
        {"simulation.heteroscedastic_noise_slope", [&] { c.simulation.heteroscedastic_noise_slope = real(); }},
        {"simulation.n_samples", [&] { c.simulation.n_samples = integer(); }},
        {"simulation.n_replicates", [&] { c.simulation.n_replicates = integer(); }},
        {"simulation.rng_seed", [&] { c.simulation.rng_seed = parse_seed(value, w); }},
        {"simulation.crosstalk_blank_samples", [&] { c.simulation.crosstalk_blank_samples = integer(); }},
        {"simulation.damage_grid", [&] { c.damage_grid = parse_list(value, w); }},
        {"simulation.load_grid", [&] { c.load_grid = parse_list(value, w); }},
        {"di.kind", [&] { c.di.settings.kind = parse_di_kind(value); }},
        {"di.mode", [&] { c.di.settings.mode = parse_normalized_mode(value); }},
        {"di.policy", [&] { c.di.policy.kind = parse_reference_policy(value); }},
        {"di.n_use",
         [&] {
             const int n = integer();
             require(n >= 1, ErrorKind::invalid_argument, w + ": must be at least 1");
             c.di.settings.n_use = static_cast<std::size_t>(n);
         }},
        {"di.fixed_damage", [&] { c.di.policy.fixed_damage = real(); }},
        {"di.fixed_load", [&] { c.di.policy.fixed_load = real(); }},
        {"train.model", [&] { c.train.model_kind = parse_model_kind(value); }},
        {"train.restarts", [&] { c.train.restarts = integer(); }},
        {"train.seed", [&] { c.train.seed = parse_seed(value, w); }},
        {"train.center_targets", [&] { c.train.center_targets = parse_bool(value, w); }},
        {"train.train_fraction", [&] { c.train.train_fraction = real(); }},
        {"quantify.grid_refine", [&] { c.quantify.grid_refine = integer(); }},
        {"quantify.low_confidence_threshold", [&] { c.quantify.options.low_confidence_threshold = real(); }},
        {"quantify.ambiguity_ratio", [&] { c.quantify.options.ambiguity_ratio = real(); }},
        {"quantify.interval_sigmas", [&] { c.quantify.options.interval_sigmas = real(); }},
        {"paths.workdir", [&] { c.paths.workdir = value; }},
        {"paths.model_file", [&] { c.paths.model_file = value; }},
        {"paths.report_dir", [&] { c.paths.report_dir = value; }},
    };
    const auto it = setters.find(key);
    require(it != setters.end(), ErrorKind::parse, where + ": unknown config key '" + key + "'");
    it->second();
}

PipelineConfig parse_config(std::istream& in, const std::string& source_name) {
    PipelineConfig config;
    std::string section;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string where = source_name + ":" + std::to_string(line_no);
        const std::string text = trim(strip_comment(line));
        if (text.empty()) {
            continue;
        }
        if (text.front() == '[') {
            require(text.back() == ']' && text.size() > 2, ErrorKind::parse, where + ": malformed section header");
            section = trim(text.substr(1, text.size() - 2));
            continue;
        }
        const auto eq = text.find('=');
        require(eq != std::string::npos, ErrorKind::parse, where + ": expected 'key = value'");
        const std::string key = trim(text.substr(0, eq));
        require(!key.empty(), ErrorKind::parse, where + ": empty key");
        apply_config_value(config, section.empty() ? key : section + "." + key, text.substr(eq + 1), where);
    }
    config.validate();
    return config;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorKind::io, "cannot open config file '" + path.string() + "'");
    return parse_config(in, path.string());
}

std::optional<std::uint64_t> apply_seed_environment(PipelineConfig& config) {
    const char* env = std::getenv("GWQUANT_SEED");
    if (env == nullptr || *env == '\0') {
        return std::nullopt;
    }
    const std::uint64_t seed = parse_seed(env, "GWQUANT_SEED");
    config.set_seed(seed);
    return seed;
}

}  // namespace gwquant
