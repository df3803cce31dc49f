#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gwquant/config.hpp"
#include "gwquant/metrics.hpp"
#include "gwquant/quantify.hpp"
#include "gwquant/report.hpp"

namespace gwquant::cli {

namespace fs = std::filesystem;

/// Formats a metric with four significant digits.
std::string format_metric(double value);

/// Simulates the configured damage x load grid; writes the signal CSV and a
/// manifest (`damage,load,replicate,role`, one line per signal).
std::size_t cmd_simulate(const PipelineConfig& config, const fs::path& signals_out, const fs::path& manifest_out);

/// Computes the configured DI dataset from a signal CSV.
DiDataset cmd_di(const PipelineConfig& config, const fs::path& signals_in, const fs::path& dataset_out);

struct TrainOutcome {
    FitMetrics metrics;
    Eigen::Index n_train = 0;
    Eigen::Index n_test = 0;
};

/// Stratified split, training, persistence and held-out metrics.
TrainOutcome cmd_train(const PipelineConfig& config, const fs::path& dataset_in, const fs::path& model_out,
                       const std::optional<fs::path>& train_out, const std::optional<fs::path>& test_out);

FitMetrics cmd_evaluate(const fs::path& model_file, const fs::path& dataset_in);

struct PredictRequest {
    fs::path model_file;
    std::optional<double> test_di;
    std::optional<fs::path> test_di_file;
    std::optional<double> known_load;
    bool two_state = false;
    /// Two-state mode: signals to classify and the bank supplying references.
    std::optional<fs::path> test_signals;
    std::optional<fs::path> reference_signals;
    int grid_refine = 0;
    QuantifyOptions options;
    /// DI settings used to build the training data (two-state mode).
    DiSettings di;
};

struct PredictionRecord {
    GridState true_state;  // meaningful only when has_truth
    bool has_truth = false;
    StateProbabilityTable table;
    std::optional<TwoStepPrediction> two_step;
};

std::vector<PredictionRecord> run_predictions(const PredictRequest& request);

/// JSON text: one object for a single `--test-di`, otherwise an array.
std::string predictions_json(const std::vector<PredictionRecord>& records, bool single);

/// Writes `boxplot.csv` and `prediction_error.csv` into `report_dir`.
SummaryReport cmd_report(const std::vector<PredictionRecord>& records, const fs::path& report_dir);

/// Runs simulate, di, train, predict and report into `config.paths.workdir`.
void cmd_run(const PipelineConfig& config, std::ostream& log);

}  // namespace gwquant::cli
