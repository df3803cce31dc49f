#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gwquant/damage_index.hpp"
#include "gwquant/model_io.hpp"
#include "gwquant/optimizer.hpp"
#include "gwquant/quantify.hpp"
#include "gwquant/signals.hpp"

namespace gwquant {

struct DiConfig {
    DiSettings settings;
    ReferencePolicy policy;
};

struct TrainConfig {
    ModelKind model_kind = ModelKind::sgpr;
    int restarts = 5;
    std::uint64_t seed = 42;
    bool center_targets = false;
    double train_fraction = 0.5;

    [[nodiscard]] OptimizerConfig optimizer() const;
};

struct QuantifyConfig {
    int grid_refine = 0;
    QuantifyOptions options;
};

struct PathsConfig {
    std::filesystem::path workdir = ".";
    std::filesystem::path model_file = "model.txt";
    std::filesystem::path report_dir = "report";
};

struct PipelineConfig {
    SimulationConfig simulation;
    std::vector<double> damage_grid = {0.0, 2.0, 4.0, 6.0, 8.0};
    std::vector<double> load_grid = {0.0, 1.0, 2.0, 3.0};
    DiConfig di;
    TrainConfig train;
    QuantifyConfig quantify;
    PathsConfig paths;

    /// Sets every seeded stage (simulation and training) to one seed.
    void set_seed(std::uint64_t seed);

    /// Throws invalid-argument when any sub-config breaks its invariants.
    void validate() const;
};

// Config grammar (one entry per line):
//   # comment             -- ignored, also after values
//   [section]             -- prefixes following keys with "section."
//   key = value           -- value is a number, true/false, a bare or
//                            "quoted" string, or a list "[v1, v2, ...]"
// Unknown keys are rejected so typos surface as errors.
PipelineConfig parse_config(std::istream& in, const std::string& source_name = "<stream>");
PipelineConfig load_config(const std::filesystem::path& path);

/// Applies one `key = value` assignment (keys in dotted form).
void apply_config_value(PipelineConfig& config, const std::string& key, const std::string& value,
                        const std::string& where);

/// Applies GWQUANT_SEED when set in the environment; returns the seed applied.
std::optional<std::uint64_t> apply_seed_environment(PipelineConfig& config);

std::uint64_t parse_seed(const std::string& text, const std::string& where);

}  // namespace gwquant
