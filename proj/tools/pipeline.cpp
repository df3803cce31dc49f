#include "pipeline.hpp"

#include <cstdio>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <tuple>
#include <sstream>

#include <json.hpp>

#include "gwquant/di_dataset.hpp"
#include "gwquant/error.hpp"
#include "gwquant/io_util.hpp"
#include "gwquant/model_io.hpp"
#include "gwquant/signal_csv.hpp"
#include "gwquant/split.hpp"

namespace gwquant::cli {

namespace {

using nlohmann::ordered_json;

TrainTestSplit split_dataset(const PipelineConfig& config, const DiDataset& dataset) {
    std::mt19937_64 rng(config.train.seed);
    return stratified_split(dataset.inputs, config.train.train_fraction, rng);
}

std::vector<double> unique_column(const Eigen::MatrixXd& x, Eigen::Index col, std::optional<double> switch_value) {
    std::set<double> values;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        if (switch_value && x(i, 2) != *switch_value) {
            continue;
        }
        values.insert(x(i, col));
    }
    return {values.begin(), values.end()};
}

ordered_json state_json(const GridState& s) {
    ordered_json j;
    j["damage"] = s.damage;
    j["load"] = s.load ? ordered_json(*s.load) : ordered_json(nullptr);
    return j;
}

ordered_json table_json(const StateProbabilityTable& t) {
    ordered_json j;
    j["test_di"] = t.test_di;
    j["argmax"] = state_json(t.argmax_state);
    j["max_probability"] = t.max_probability;
    j["low_confidence"] = t.low_confidence;
    j["closest_training_di"] = t.closest_training_di;
    j["closest_variance"] = t.closest_variance;
    ordered_json probs = ordered_json::array();
    for (const StateProbability& e : t.entries) {
        ordered_json p = state_json(e.state);
        p["p"] = e.probability;
        probs.push_back(std::move(p));
    }
    j["probabilities"] = std::move(probs);
    return j;
}

std::string to_text(const std::function<void(std::ostream&)>& writer) {
    std::ostringstream out;
    writer(out);
    return out.str();
}

std::vector<PredictionRecord> predict_single(const PredictRequest& request, const Regressor& model) {
    const Eigen::Index dim = model.input_dim();
    require(dim <= 2, ErrorKind::covariate_mismatch,
            "model has a switch input; use two-state prediction (--two-state) with test signals");

    struct Query {
        double di;
        std::optional<double> load;
        std::optional<GridState> truth;
    };
    std::vector<Query> queries;
    if (request.test_di) {
        queries.push_back({*request.test_di, request.known_load, std::nullopt});
    } else {
        const DiDataset data = read_di_dataset_csv(*request.test_di_file);
        const auto load_col = data.column("load");
        require(!data.column("switch"), ErrorKind::covariate_mismatch,
                "test DI file has a switch column; use two-state prediction");
        for (Eigen::Index i = 0; i < data.size(); ++i) {
            GridState truth{data.inputs(i, 0), std::nullopt};
            std::optional<double> load = request.known_load;
            if (load_col) {
                truth.load = data.inputs(i, *load_col);
                if (!load && dim == 2) {
                    load = truth.load;
                }
            }
            queries.push_back({data.targets(i), load, truth});
        }
    }

    std::vector<PredictionRecord> records;
    for (const Query& q : queries) {
        PredictionRecord rec;
        if (q.load || dim == 1) {
            const StateGrid grid = StateGrid::from_training_inputs(model.train_inputs(), false).refined(request.grid_refine);
            rec.table = predict_single_state(model, grid, q.di, dim == 2 ? q.load : std::nullopt, request.options);
        } else {
            const StateGrid grid = StateGrid::from_training_inputs(model.train_inputs(), true).refined(request.grid_refine);
            rec.table = state_probabilities(model, grid, q.di, {}, request.options);
        }
        if (q.truth) {
            rec.has_truth = true;
            rec.true_state = *q.truth;
            if (!rec.table.argmax_state.load) {
                rec.true_state.load.reset();
            }
        }
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<PredictionRecord> predict_two_state(const PredictRequest& request, const Regressor& model) {
    require(request.test_signals && request.reference_signals, ErrorKind::invalid_argument,
            "two-state prediction needs test signals and reference signals");
    require(model.input_dim() == 3, ErrorKind::covariate_mismatch,
            "two-state prediction needs a model trained on damage, load and switch inputs");
    const std::vector<Signal> tests = read_signals_csv(*request.test_signals);
    const std::vector<Signal> references = read_signals_csv(*request.reference_signals);
    const ReferenceBank bank(references);

    std::vector<double> damages = unique_column(model.train_inputs(), 0, 1.0);
    if (request.grid_refine > 0) {
        damages.clear();
        for (const GridState& s : StateGrid::damages(unique_column(model.train_inputs(), 0, 1.0))
                                      .refined(request.grid_refine)
                                      .states()) {
            damages.push_back(s.damage);
        }
    }
    const std::vector<double> loads = unique_column(model.train_inputs(), 1, 1.0);
    const std::vector<double> reference_loads = bank.loads_at_damage(0.0);
    require(!reference_loads.empty(), ErrorKind::missing_baseline, "reference signals contain no healthy state");

    std::vector<PredictionRecord> records;
    for (const Signal& sig : tests) {
        std::vector<ReferenceDi> class1;
        for (const double load : reference_loads) {
            class1.push_back({load, di_against_reference(bank, sig, 0.0, load, request.di)});
        }
        const Class2DiProvider provider = [&](double damage) {
            return di_against_reference(bank, sig, damage, 0.0, request.di);
        };
        PredictionRecord rec;
        rec.two_step = predict_two_states(model, class1, provider, damages, loads, request.options);
        rec.table = rec.two_step->step2_table;
        rec.has_truth = true;
        rec.true_state = {sig.state().damage_size, sig.state().load};
        records.push_back(std::move(rec));
    }
    return records;
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        require(!ec, ErrorKind::io, "cannot create directory '" + path.parent_path().string() + "': " + ec.message());
    }
    write_file_atomically(path, text);
}

}  // namespace

std::string format_metric(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.4g", value);
    return buffer;
}

std::size_t cmd_simulate(const PipelineConfig& config, const fs::path& signals_out, const fs::path& manifest_out) {
    config.validate();
    const std::vector<Signal> signals = simulate_dataset(config.simulation, config.damage_grid, config.load_grid);
    write_text(signals_out, to_text([&](std::ostream& out) {
                   write_signals_csv(out, signals, config.simulation.rng_seed);
               }));
    write_text(manifest_out, to_text([&](std::ostream& out) {
                   out << "# gwquant seed=" << config.simulation.rng_seed << '\n';
                   out << "damage,load,replicate,role\n";
                   for (const Signal& s : signals) {
                       out << format_real(s.state().damage_size) << ',' << format_real(s.state().load) << ','
                           << s.state().replicate << ',' << to_string(s.state().role) << '\n';
                   }
               }));
    return signals.size();
}

DiDataset cmd_di(const PipelineConfig& config, const fs::path& signals_in, const fs::path& dataset_out) {
    const std::vector<Signal> signals = read_signals_csv(signals_in);
    DiBuildResult result = build_di_dataset(signals, config.di.settings, config.di.policy);
    write_text(dataset_out, to_text([&](std::ostream& out) {
                   write_di_dataset_csv(out, result.dataset, config.simulation.rng_seed);
               }));
    return std::move(result.dataset);
}

TrainOutcome cmd_train(const PipelineConfig& config, const fs::path& dataset_in, const fs::path& model_out,
                       const std::optional<fs::path>& train_out, const std::optional<fs::path>& test_out) {
    config.validate();
    const DiDataset dataset = read_di_dataset_csv(dataset_in);
    const TrainTestSplit split = split_dataset(config, dataset);
    require(!split.train_rows.empty() && !split.test_rows.empty(), ErrorKind::invalid_argument,
            "dataset too small for a train/test split");
    const DiDataset train = select_rows(dataset, split.train_rows);
    const DiDataset test = select_rows(dataset, split.test_rows);

    const OptimizerConfig optimizer = config.train.optimizer();
    std::optional<AnyModel> model;
    if (config.train.model_kind == ModelKind::sgpr) {
        model.emplace(train_sgpr(train.inputs, train.targets, optimizer));
    } else {
        model.emplace(train_vhgpr(train.inputs, train.targets, optimizer));
    }
    write_text(model_out, to_text([&](std::ostream& out) { save_model(out, *model, config.train.seed); }));
    if (train_out) {
        write_text(*train_out, to_text([&](std::ostream& out) { write_di_dataset_csv(out, train, config.train.seed); }));
    }
    if (test_out) {
        write_text(*test_out, to_text([&](std::ostream& out) { write_di_dataset_csv(out, test, config.train.seed); }));
    }
    TrainOutcome outcome;
    outcome.n_train = train.size();
    outcome.n_test = test.size();
    outcome.metrics = evaluate_fit(as_regressor(*model).predict(test.inputs), test.targets, train.targets);
    return outcome;
}

FitMetrics cmd_evaluate(const fs::path& model_file, const fs::path& dataset_in) {
    const AnyModel model = load_model(model_file);
    const DiDataset data = read_di_dataset_csv(dataset_in);
    const Regressor& r = as_regressor(model);
    require(data.dim() == r.input_dim(), ErrorKind::covariate_mismatch,
            "dataset has " + std::to_string(data.dim()) + " input columns but the model expects " +
                std::to_string(r.input_dim()));
    return evaluate_fit(r.predict(data.inputs), data.targets, r.train_targets());
}

std::vector<PredictionRecord> run_predictions(const PredictRequest& request) {
    const AnyModel model = load_model(request.model_file);
    const Regressor& r = as_regressor(model);
    if (request.two_state) {
        return predict_two_state(request, r);
    }
    require(request.test_di.has_value() != request.test_di_file.has_value(), ErrorKind::invalid_argument,
            "exactly one of a test DI value or a test DI file is required");
    return predict_single(request, r);
}

std::string predictions_json(const std::vector<PredictionRecord>& records, bool single) {
    ordered_json all = ordered_json::array();
    for (const PredictionRecord& rec : records) {
        ordered_json j = table_json(rec.table);
        if (rec.has_truth) {
            j["true_state"] = state_json(rec.true_state);
        }
        if (rec.two_step) {
            ordered_json step1 = table_json(rec.two_step->step1_table);
            step1["reference_load"] = rec.two_step->step1_reference_load;
            j["step1"] = std::move(step1);
        }
        all.push_back(std::move(j));
    }
    if (single && all.size() == 1) {
        return all[0].dump(2) + "\n";
    }
    return all.dump(2) + "\n";
}

SummaryReport cmd_report(const std::vector<PredictionRecord>& records, const fs::path& report_dir) {
    std::vector<GridState> truth;
    std::vector<GridState> predicted;
    for (const PredictionRecord& rec : records) {
        require(rec.has_truth, ErrorKind::invalid_argument, "report needs predictions with known true states");
        truth.push_back(rec.true_state);
        predicted.push_back(rec.table.argmax_state);
    }
    const SummaryReport report = summarize_predictions(truth, predicted);
    write_text(report_dir / "boxplot.csv", to_text([&](std::ostream& out) { write_boxplot_csv(out, report); }));
    write_text(report_dir / "prediction_error.csv",
               to_text([&](std::ostream& out) { write_prediction_error_csv(out, report); }));
    return report;
}

void cmd_run(const PipelineConfig& config, std::ostream& log) {
    config.validate();
    const fs::path dir = config.paths.workdir;
    const fs::path signals = dir / "signals.csv";
    const fs::path dataset = dir / "di.csv";
    const fs::path model_file = config.paths.model_file.is_absolute() ? config.paths.model_file
                                                                       : dir / config.paths.model_file;
    const fs::path report_dir = config.paths.report_dir.is_absolute() ? config.paths.report_dir
                                                                       : dir / config.paths.report_dir;

    const std::size_t n_signals = cmd_simulate(config, signals, dir / "manifest.csv");
    log << "simulate: " << n_signals << " signals -> " << signals.string() << '\n';
    const DiDataset di = cmd_di(config, signals, dataset);
    log << "di: " << di.size() << " rows x " << di.dim() << " inputs -> " << dataset.string() << '\n';

    const TrainOutcome outcome = cmd_train(config, dataset, model_file, dir / "train.csv", dir / "test.csv");
    const std::string metrics = "model=" + std::string(to_string(config.train.model_kind)) +
                                " n_train=" + std::to_string(outcome.n_train) +
                                " n_test=" + std::to_string(outcome.n_test) +
                                " nmse=" + format_metric(outcome.metrics.nmse) +
                                " rss_sss_percent=" + format_metric(outcome.metrics.rss_sss_percent) + "\n";
    write_text(dir / "metrics.txt", metrics);
    log << "train: " << metrics;

    PredictRequest request;
    request.model_file = model_file;
    request.grid_refine = config.quantify.grid_refine;
    request.options = config.quantify.options;
    request.di = config.di.settings;
    if (config.di.policy.kind == ReferencePolicyKind::both_classes) {
        // Held-out signals are those whose class-1 DI row was held out.
        const DiDataset full = read_di_dataset_csv(dataset);
        const TrainTestSplit split = split_dataset(config, full);
        const std::vector<Signal> all = read_signals_csv(signals);
        const DiBuildResult built = build_di_dataset(all, config.di.settings, config.di.policy);
        std::set<std::tuple<double, double, int>> held_out;
        for (const Eigen::Index row : split.test_rows) {
            const DiValue& v = built.values[static_cast<std::size_t>(row)];
            if (v.reference_class == ReferenceClass::class1) {
                held_out.insert({v.state.damage_size, v.state.load, v.state.replicate});
            }
        }
        std::vector<Signal> tests;
        for (const Signal& s : all) {
            if (held_out.count({s.state().damage_size, s.state().load, s.state().replicate}) != 0) {
                tests.push_back(s);
            }
        }
        const fs::path test_signals = dir / "test_signals.csv";
        write_text(test_signals, to_text([&](std::ostream& out) {
                       write_signals_csv(out, tests, config.simulation.rng_seed);
                   }));
        request.two_state = true;
        request.test_signals = test_signals;
        request.reference_signals = signals;
    } else {
        request.test_di_file = dir / "test.csv";
    }
    const std::vector<PredictionRecord> records = run_predictions(request);
    write_text(dir / "predictions.json", predictions_json(records, false));
    std::size_t correct = 0;
    for (const PredictionRecord& rec : records) {
        correct += rec.table.argmax_state == rec.true_state ? 1 : 0;
    }
    log << "predict: " << records.size() << " test points, argmax correct " << correct << '\n';
    cmd_report(records, report_dir);
    log << "report: " << (report_dir / "boxplot.csv").string() << ", "
        << (report_dir / "prediction_error.csv").string() << '\n';
}

}  // namespace gwquant::cli
