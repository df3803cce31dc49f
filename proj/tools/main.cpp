#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gwquant/config.hpp"
#include "gwquant/error.hpp"
#include "gwquant/io_util.hpp"
#include "pipeline.hpp"

namespace {

using namespace gwquant;
namespace fs = std::filesystem;

constexpr int kExitDomainError = 1;
constexpr int kExitUsageError = 2;

std::vector<double> parse_grid(const std::string& text, const std::string& flag) {
    std::vector<double> values;
    for (const std::string& item : split(text, ',')) {
        values.push_back(parse_real(trim(item), flag));
    }
    return values;
}

std::string one_line(std::string text) {
    for (char& c : text) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    return text;
}

/// Flags shared by every subcommand that reads a pipeline config.
struct CommonFlags {
    std::string config_file;
    std::optional<std::string> seed;

    void add(CLI::App* app) {
        app->add_option("--config", config_file, "Pipeline config file (key = value grammar)")
            ->check(CLI::ExistingFile);
        app->add_option("--seed", seed, "Seed for every randomized stage (overrides GWQUANT_SEED)");
    }

    [[nodiscard]] PipelineConfig load() const {
        PipelineConfig config = config_file.empty() ? PipelineConfig{} : load_config(config_file);
        apply_seed_environment(config);
        if (seed) {
            config.set_seed(parse_seed(*seed, "--seed"));
        }
        return config;
    }
};

void print_metrics(const FitMetrics& m) {
    std::cout << "nmse=" << cli::format_metric(m.nmse) << " rss_sss_percent=" << cli::format_metric(m.rss_sss_percent)
              << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gwquant: guided-wave damage quantification with Gaussian-process regression"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "gwquant 0.1.0");

    // simulate
    CommonFlags sim_flags;
    std::string sim_out;
    std::string sim_manifest;
    std::optional<int> sim_replicates;
    std::string sim_damage_grid;
    std::string sim_load_grid;
    auto* simulate = app.add_subcommand("simulate", "Generate synthetic guided-wave signals");
    sim_flags.add(simulate);
    simulate->add_option("--out", sim_out, "Signal CSV to write (default <workdir>/signals.csv)");
    simulate->add_option("--manifest", sim_manifest, "Manifest CSV to write (default <workdir>/manifest.csv)");
    simulate->add_option("--replicates", sim_replicates, "Replicates per state")->check(CLI::PositiveNumber);
    simulate->add_option("--damage-grid", sim_damage_grid, "Comma-separated damage sizes");
    simulate->add_option("--load-grid", sim_load_grid, "Comma-separated loads");

    // di
    CommonFlags di_flags;
    std::string di_signals;
    std::string di_out;
    std::optional<std::string> di_kind;
    std::optional<std::string> di_mode;
    std::optional<std::string> di_policy;
    std::optional<int> di_n_use;
    std::optional<double> di_fixed_damage;
    std::optional<double> di_fixed_load;
    auto* di = app.add_subcommand("di", "Compute damage indices from signals");
    di_flags.add(di);
    di->add_option("--signals", di_signals, "Signal CSV")->required()->check(CLI::ExistingFile);
    di->add_option("--out", di_out, "DI dataset CSV to write")->required();
    di->add_option("--kind", di_kind, "rmsd|normalized")->check(CLI::IsMember({"rmsd", "normalized"}));
    di->add_option("--mode", di_mode, "projection|as-written")->check(CLI::IsMember({"projection", "as-written"}));
    di->add_option("--policy", di_policy, "class1|class2|both|fixed")
        ->check(CLI::IsMember({"class1", "class2", "both", "fixed"}));
    di->add_option("--n-use", di_n_use, "Samples used per DI")->check(CLI::PositiveNumber);
    di->add_option("--fixed-damage", di_fixed_damage, "Reference damage for the fixed policy");
    di->add_option("--fixed-load", di_fixed_load, "Reference load for the fixed policy");

    // train
    CommonFlags train_flags;
    std::string train_data;
    std::optional<std::string> train_model;
    std::optional<int> train_restarts;
    bool train_center = false;
    std::optional<double> train_fraction;
    std::string train_model_file;
    std::optional<std::string> train_out;
    std::optional<std::string> test_out;
    auto* train = app.add_subcommand("train", "Train a regression model on a DI dataset");
    train_flags.add(train);
    train->add_option("--data", train_data, "DI dataset CSV")->required()->check(CLI::ExistingFile);
    train->add_option("--model", train_model, "sgpr|vhgpr")->check(CLI::IsMember({"sgpr", "vhgpr"}));
    train->add_option("--restarts", train_restarts, "Optimizer restarts")->check(CLI::NonNegativeNumber);
    train->add_flag("--center-targets", train_center, "Subtract the training mean from targets");
    train->add_option("--train-fraction", train_fraction, "Fraction of each state used for training")
        ->check(CLI::Range(0.0, 1.0));
    train->add_option("--model-file", train_model_file, "Model file to write (default from config)");
    train->add_option("--train-out", train_out, "Write the training rows as DI CSV");
    train->add_option("--test-out", test_out, "Write the held-out rows as DI CSV");

    // evaluate
    std::string eval_model;
    std::string eval_data;
    auto* evaluate = app.add_subcommand("evaluate", "Recompute fit metrics for a model on a dataset");
    evaluate->add_option("--model-file", eval_model, "Model file")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--data", eval_data, "DI dataset CSV")->required()->check(CLI::ExistingFile);

    // predict and report share the quantification flags
    CommonFlags predict_flags;
    cli::PredictRequest request;
    std::string request_model;
    std::optional<std::string> test_di_file;
    std::optional<std::string> test_signals;
    std::optional<std::string> reference_signals;
    std::optional<int> grid_refine;
    std::optional<double> low_confidence;
    std::optional<std::string> predict_out;
    std::optional<std::string> predict_kind;
    std::optional<std::string> predict_mode;
    std::optional<int> predict_n_use;
    std::string report_dir;

    auto add_quantify_flags = [&](CLI::App* cmd) {
        predict_flags.add(cmd);
        cmd->add_option("--model-file", request_model, "Model file")->required()->check(CLI::ExistingFile);
        cmd->add_option("--known-load", request.known_load, "Load fixed during single-state prediction");
        cmd->add_flag("--two-state", request.two_state, "Two-step damage and load prediction from signals");
        cmd->add_option("--test-signals", test_signals, "Signals to classify (two-state)")
            ->check(CLI::ExistingFile);
        cmd->add_option("--reference-signals", reference_signals, "Reference signal bank (two-state)")
            ->check(CLI::ExistingFile);
        cmd->add_option("--grid-refine", grid_refine, "Interpolated damages inserted between training states")
            ->check(CLI::NonNegativeNumber);
        cmd->add_option("--low-confidence-threshold", low_confidence, "Max probability below which a result is flagged")
            ->check(CLI::Range(0.0, 1.0));
        cmd->add_option("--kind", predict_kind, "DI kind for two-state DIs")
            ->check(CLI::IsMember({"rmsd", "normalized"}));
        cmd->add_option("--mode", predict_mode, "Normalized DI mode for two-state DIs")
            ->check(CLI::IsMember({"projection", "as-written"}));
        cmd->add_option("--n-use", predict_n_use, "Samples per DI for two-state DIs")->check(CLI::PositiveNumber);
    };

    auto* predict = app.add_subcommand("predict", "State probabilities for test DIs");
    add_quantify_flags(predict);
    auto* test_di_opt = predict->add_option("--test-di", request.test_di, "Single test DI value");
    auto* test_file_opt =
        predict->add_option("--test-di-file", test_di_file, "DI dataset CSV of test points")->check(CLI::ExistingFile);
    test_di_opt->excludes(test_file_opt);
    predict->add_option("--out", predict_out, "JSON output file (default stdout)");

    auto* report = app.add_subcommand("report", "Box-plot and prediction-error CSVs for labelled test data");
    add_quantify_flags(report);
    report->add_option("--data", test_di_file, "Held-out DI dataset CSV")->check(CLI::ExistingFile);
    report->add_option("--report-dir", report_dir, "Output directory (default from config)");

    // run
    CommonFlags run_flags;
    std::optional<std::string> run_workdir;
    std::optional<std::string> run_model;
    std::optional<std::string> run_policy;
    auto* run = app.add_subcommand("run", "Full pipeline: simulate, di, train, predict, report");
    run_flags.add(run);
    run->add_option("--workdir", run_workdir, "Output directory");
    run->add_option("--model", run_model, "sgpr|vhgpr")->check(CLI::IsMember({"sgpr", "vhgpr"}));
    run->add_option("--policy", run_policy, "class1|class2|both|fixed")
        ->check(CLI::IsMember({"class1", "class2", "both", "fixed"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsageError;
    }

    try {
        if (simulate->parsed()) {
            PipelineConfig config = sim_flags.load();
            if (sim_replicates) config.simulation.n_replicates = *sim_replicates;
            if (!sim_damage_grid.empty()) config.damage_grid = parse_grid(sim_damage_grid, "--damage-grid");
            if (!sim_load_grid.empty()) config.load_grid = parse_grid(sim_load_grid, "--load-grid");
            const fs::path out = sim_out.empty() ? config.paths.workdir / "signals.csv" : fs::path(sim_out);
            const fs::path manifest =
                sim_manifest.empty() ? config.paths.workdir / "manifest.csv" : fs::path(sim_manifest);
            const std::size_t n = cli::cmd_simulate(config, out, manifest);
            std::cout << "signals=" << n << " file=" << out.string() << " manifest=" << manifest.string() << '\n';
        } else if (di->parsed()) {
            PipelineConfig config = di_flags.load();
            if (di_kind) config.di.settings.kind = parse_di_kind(*di_kind);
            if (di_mode) config.di.settings.mode = parse_normalized_mode(*di_mode);
            if (di_policy) config.di.policy.kind = parse_reference_policy(*di_policy);
            if (di_n_use) config.di.settings.n_use = static_cast<std::size_t>(*di_n_use);
            if (di_fixed_damage) config.di.policy.fixed_damage = *di_fixed_damage;
            if (di_fixed_load) config.di.policy.fixed_load = *di_fixed_load;
            const DiDataset ds = cli::cmd_di(config, di_signals, di_out);
            std::cout << "rows=" << ds.size() << " inputs=" << ds.dim() << " file=" << di_out << '\n';
        } else if (train->parsed()) {
            PipelineConfig config = train_flags.load();
            if (train_model) config.train.model_kind = parse_model_kind(*train_model);
            if (train_restarts) config.train.restarts = *train_restarts;
            if (train_center) config.train.center_targets = true;
            if (train_fraction) config.train.train_fraction = *train_fraction;
            const fs::path model_file = train_model_file.empty() ? config.paths.model_file : fs::path(train_model_file);
            const auto to_path = [](const std::optional<std::string>& s) {
                return s ? std::optional<fs::path>(*s) : std::nullopt;
            };
            const cli::TrainOutcome outcome =
                cli::cmd_train(config, train_data, model_file, to_path(train_out), to_path(test_out));
            std::cout << "model=" << to_string(config.train.model_kind) << " n_train=" << outcome.n_train
                      << " n_test=" << outcome.n_test << " file=" << model_file.string() << '\n';
            print_metrics(outcome.metrics);
        } else if (evaluate->parsed()) {
            print_metrics(cli::cmd_evaluate(eval_model, eval_data));
        } else if (predict->parsed() || report->parsed()) {
            const PipelineConfig config = predict_flags.load();
            request.model_file = request_model;
            request.options = config.quantify.options;
            request.grid_refine = grid_refine.value_or(config.quantify.grid_refine);
            if (low_confidence) request.options.low_confidence_threshold = *low_confidence;
            request.di = config.di.settings;
            if (predict_kind) request.di.kind = parse_di_kind(*predict_kind);
            if (predict_mode) request.di.mode = parse_normalized_mode(*predict_mode);
            if (predict_n_use) request.di.n_use = static_cast<std::size_t>(*predict_n_use);
            if (test_di_file) request.test_di_file = *test_di_file;
            if (test_signals) request.test_signals = *test_signals;
            if (reference_signals) request.reference_signals = *reference_signals;
            const bool have_di = request.test_di || request.test_di_file;
            if (request.two_state ? (!test_signals || !reference_signals) : !have_di) {
                std::cerr << "error: usage: "
                          << (request.two_state ? "--two-state needs --test-signals and --reference-signals"
                                                : "a test DI (--test-di, --test-di-file or --data) is required")
                          << '\n';
                return kExitUsageError;
            }
            const std::vector<cli::PredictionRecord> records = cli::run_predictions(request);
            if (predict->parsed()) {
                const std::string json = cli::predictions_json(records, request.test_di.has_value());
                if (predict_out) {
                    write_file_atomically(*predict_out, json);
                } else {
                    std::cout << json;
                }
            } else {
                const fs::path dir = report_dir.empty() ? config.paths.report_dir : fs::path(report_dir);
                const SummaryReport summary = cli::cmd_report(records, dir);
                std::cout << "states=" << summary.states.size() << " predictions=" << summary.errors.size()
                          << " dir=" << dir.string() << '\n';
            }
        } else if (run->parsed()) {
            PipelineConfig config = run_flags.load();
            if (run_workdir) config.paths.workdir = *run_workdir;
            if (run_model) config.train.model_kind = parse_model_kind(*run_model);
            if (run_policy) config.di.policy.kind = parse_reference_policy(*run_policy);
            cli::cmd_run(config, std::cout);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << to_string(e.kind()) << ": " << one_line(e.what()) << '\n';
        return kExitDomainError;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << one_line(e.what()) << '\n';
        return kExitDomainError;
    }
    return EXIT_SUCCESS;
}
