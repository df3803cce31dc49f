#include "gwquant/quantify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "gwquant/error.hpp"

namespace gwquant {

namespace {

double load_key(const std::optional<double>& load) {
    return load ? *load : -std::numeric_limits<double>::infinity();
}

std::vector<double> sorted_unique(std::span<const double> values) {
    std::vector<double> out(values.begin(), values.end());
    for (const double v : out) {
        require(std::isfinite(v), ErrorKind::invalid_argument, "grid values must be finite");
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// Builds the model query row for a candidate state.
void fill_query_row(Eigen::MatrixXd& queries, Eigen::Index r, const GridState& state, const FixedCovariates& fixed) {
    const Eigen::Index dim = queries.cols();
    auto row = queries.row(r);
    row(0) = state.damage;
    if (dim >= 2) {
        const std::optional<double> load = state.load ? state.load : fixed.load;
        require(load.has_value(), ErrorKind::covariate_mismatch,
                "model expects a load input but neither the grid state nor the fixed covariates provide one");
        row(1) = *load;
    } else {
        require(!state.load && !fixed.load, ErrorKind::covariate_mismatch,
                "model has a single damage input but a load covariate was supplied");
    }
    if (dim >= 3) {
        require(fixed.switch_value.has_value(), ErrorKind::covariate_mismatch,
                "model expects a switch input but none was supplied");
        row(2) = *fixed.switch_value;
    } else {
        require(!fixed.switch_value, ErrorKind::covariate_mismatch,
                "a switch covariate was supplied but the model has no switch input");
    }
}

bool row_matches(const Eigen::MatrixXd& inputs, Eigen::Index i, const FixedCovariates& fixed) {
    if (fixed.load && inputs.cols() >= 2 && inputs(i, 1) != *fixed.load) {
        return false;
    }
    if (fixed.switch_value && inputs.cols() >= 3 && inputs(i, 2) != *fixed.switch_value) {
        return false;
    }
    return true;
}

}  // namespace

bool state_less(const GridState& a, const GridState& b) {
    if (a.damage != b.damage) {
        return a.damage < b.damage;
    }
    return load_key(a.load) < load_key(b.load);
}

StateGrid::StateGrid(std::vector<GridState> states, std::string source)
    : states_(std::move(states)), source_(std::move(source)) {
    for (const GridState& s : states_) {
        require(std::isfinite(s.damage) && (!s.load || std::isfinite(*s.load)), ErrorKind::invalid_argument,
                "grid states must be finite");
    }
    std::sort(states_.begin(), states_.end(), state_less);
    states_.erase(std::unique(states_.begin(), states_.end()), states_.end());
}

StateGrid StateGrid::from_training_inputs(const Eigen::Ref<const Eigen::MatrixXd>& inputs, bool include_load,
                                          std::optional<double> switch_value) {
    require(inputs.cols() >= 1, ErrorKind::dimension_mismatch, "training inputs have no columns");
    require(!include_load || inputs.cols() >= 2, ErrorKind::covariate_mismatch,
            "cannot take loads from single-input training data");
    require(!switch_value || inputs.cols() >= 3, ErrorKind::covariate_mismatch,
            "cannot filter by switch on training data without a switch column");
    std::vector<GridState> states;
    for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
        if (switch_value && inputs(i, 2) != *switch_value) {
            continue;
        }
        GridState s{inputs(i, 0), std::nullopt};
        if (include_load) {
            s.load = inputs(i, 1);
        }
        states.push_back(s);
    }
    return StateGrid(std::move(states), "training");
}

StateGrid StateGrid::damages(std::span<const double> damage_values) {
    std::vector<GridState> states;
    for (const double d : damage_values) {
        states.push_back({d, std::nullopt});
    }
    return StateGrid(std::move(states), "explicit");
}

StateGrid StateGrid::product(std::span<const double> damage_values, std::span<const double> load_values) {
    std::vector<GridState> states;
    for (const double d : damage_values) {
        for (const double l : load_values) {
            states.push_back({d, l});
        }
    }
    return StateGrid(std::move(states), "explicit");
}

StateGrid StateGrid::refined(int k) const {
    require(k >= 0, ErrorKind::invalid_argument, "refinement count must be non-negative");
    if (k == 0) {
        return *this;
    }
    std::set<double> loads_set;
    std::vector<double> damages_all;
    bool has_load = false;
    for (const GridState& s : states_) {
        damages_all.push_back(s.damage);
        if (s.load) {
            has_load = true;
            loads_set.insert(*s.load);
        }
    }
    const std::vector<double> damages_sorted = sorted_unique(damages_all);
    std::vector<double> fine;
    for (std::size_t i = 0; i < damages_sorted.size(); ++i) {
        fine.push_back(damages_sorted[i]);
        if (i + 1 < damages_sorted.size()) {
            const double lo = damages_sorted[i];
            const double hi = damages_sorted[i + 1];
            for (int j = 1; j <= k; ++j) {
                fine.push_back(lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(k + 1));
            }
        }
    }
    std::vector<GridState> states = states_;
    for (const double d : fine) {
        if (has_load) {
            for (const double l : loads_set) {
                states.push_back({d, l});
            }
        } else {
            states.push_back({d, std::nullopt});
        }
    }
    return StateGrid(std::move(states), source_.empty() ? "refined" : source_ + "+refined");
}

double gaussian_cdf(double s, double mean, double variance) {
    require(variance > 0.0 && std::isfinite(variance), ErrorKind::invalid_argument,
            "gaussian_cdf requires a positive finite variance");
    const double z = (s - mean) / std::sqrt(variance);
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double gaussian_interval_probability(double a, double b, double mean, double variance) {
    require(variance > 0.0 && std::isfinite(variance), ErrorKind::invalid_argument,
            "interval probability requires a positive finite variance");
    require(a <= b, ErrorKind::invalid_argument, "interval lower bound exceeds upper bound");
    const double sd = std::sqrt(variance);
    const double za = (a - mean) / sd;
    const double zb = (b - mean) / sd;
    double p = 0.0;
    if (za + zb > 0.0) {
        // Both bounds mostly in the upper tail: Q(za) - Q(zb).
        p = 0.5 * (std::erfc(za / std::numbers::sqrt2) - std::erfc(zb / std::numbers::sqrt2));
    } else {
        p = 0.5 * (std::erfc(-zb / std::numbers::sqrt2) - std::erfc(-za / std::numbers::sqrt2));
    }
    return std::clamp(p, 0.0, 1.0);
}

StateProbabilityTable state_probabilities(const Regressor& model, const StateGrid& grid, double test_di,
                                          const FixedCovariates& fixed, const QuantifyOptions& options) {
    require(!grid.empty(), ErrorKind::empty_grid, "the state grid is empty");
    require(std::isfinite(test_di), ErrorKind::invalid_argument, "test DI must be finite");
    require(options.interval_sigmas > 0.0, ErrorKind::invalid_argument, "interval width must be positive");
    const Eigen::MatrixXd& x = model.train_inputs();
    const Eigen::VectorXd& y = model.train_targets();
    const Eigen::Index dim = x.cols();
    require(dim >= 1 && dim <= 3, ErrorKind::covariate_mismatch, "model input dimension must be 1, 2 or 3");
    require(x.rows() > 0, ErrorKind::invalid_argument, "model has no training data");

    // Closest training target, restricted to rows sharing the fixed covariates.
    Eigen::Index closest = -1;
    double best_gap = std::numeric_limits<double>::infinity();
    for (int pass = 0; pass < 2 && closest < 0; ++pass) {
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            if (pass == 0 && !row_matches(x, i, fixed)) {
                continue;
            }
            const double gap = std::abs(y(i) - test_di);
            if (gap < best_gap) {
                best_gap = gap;
                closest = i;
            }
        }
    }

    const Eigen::Index n_states = static_cast<Eigen::Index>(grid.size());
    Eigen::MatrixXd queries(n_states + 1, dim);
    queries.row(0) = x.row(closest);
    for (Eigen::Index s = 0; s < n_states; ++s) {
        fill_query_row(queries, s + 1, grid.states()[static_cast<std::size_t>(s)], fixed);
    }
    const PredictiveMoments moments = model.predict(queries);

    StateProbabilityTable table;
    table.test_di = test_di;
    table.closest_row = closest;
    table.closest_training_di = y(closest);
    table.closest_variance = moments.variance(0);
    require(table.closest_variance > 0.0 && std::isfinite(table.closest_variance),
            ErrorKind::not_positive_definite, "predictive variance at the closest training point is not positive");
    const double half = options.interval_sigmas * std::sqrt(table.closest_variance);
    table.interval_lower = test_di - half;
    table.interval_upper = test_di + half;

    table.entries.reserve(grid.size());
    double best = -1.0;
    double runner_up = -1.0;
    for (Eigen::Index s = 0; s < n_states; ++s) {
        StateProbability entry;
        entry.state = grid.states()[static_cast<std::size_t>(s)];
        entry.mean = moments.mean(s + 1);
        entry.variance = moments.variance(s + 1);
        require(entry.variance > 0.0 && std::isfinite(entry.variance), ErrorKind::not_positive_definite,
                "predictive variance at a grid state is not positive");
        entry.probability =
            gaussian_interval_probability(table.interval_lower, table.interval_upper, entry.mean, entry.variance);
        if (entry.probability > best) {
            runner_up = best;
            best = entry.probability;
            table.argmax_state = entry.state;
        } else if (entry.probability > runner_up) {
            runner_up = entry.probability;
        }
        table.entries.push_back(entry);
    }
    table.max_probability = best;
    table.low_confidence = best < options.low_confidence_threshold ||
                           (options.ambiguity_ratio <= 1.0 && runner_up >= options.ambiguity_ratio * best);
    return table;
}

StateProbabilityTable predict_single_state(const Regressor& model, const StateGrid& damage_grid, double test_di,
                                           std::optional<double> known_load, const QuantifyOptions& options) {
    std::vector<GridState> damage_only;
    for (const GridState& s : damage_grid.states()) {
        damage_only.push_back({s.damage, std::nullopt});
    }
    const StateGrid grid(std::move(damage_only), damage_grid.source());
    FixedCovariates fixed;
    fixed.load = known_load;
    StateProbabilityTable table = state_probabilities(model, grid, test_di, fixed, options);
    if (known_load) {
        for (StateProbability& e : table.entries) {
            e.state.load = known_load;
        }
        table.argmax_state.load = known_load;
    }
    return table;
}

DamageStepResult two_step_damage(const Regressor& model, std::span<const ReferenceDi> class1_test_dis,
                                 std::span<const double> damage_grid, std::span<const double> load_grid,
                                 const QuantifyOptions& options) {
    require(!class1_test_dis.empty(), ErrorKind::missing_baseline, "no class-1 test DIs supplied for step 1");
    require(model.input_dim() == 3, ErrorKind::covariate_mismatch,
            "two-step prediction needs a model with damage, load and switch inputs");
    const StateGrid grid = StateGrid::product(damage_grid, load_grid);
    require(!grid.empty(), ErrorKind::empty_grid, "the damage x load grid is empty");
    FixedCovariates fixed;
    fixed.switch_value = 1.0;
    DamageStepResult result;
    bool have = false;
    for (const ReferenceDi& ref : class1_test_dis) {
        StateProbabilityTable table = state_probabilities(model, grid, ref.di, fixed, options);
        if (!have || table.max_probability > result.table.max_probability) {
            result.table = std::move(table);
            result.reference_load = ref.reference_load;
            have = true;
        }
    }
    return result;
}

StateProbabilityTable two_step_load(const Regressor& model, double predicted_damage, double class2_di,
                                    std::span<const double> load_grid, const QuantifyOptions& options) {
    require(model.input_dim() == 3, ErrorKind::covariate_mismatch,
            "two-step prediction needs a model with damage, load and switch inputs");
    const double damage[] = {predicted_damage};
    const StateGrid grid = StateGrid::product(damage, load_grid);
    FixedCovariates fixed;
    fixed.switch_value = 2.0;
    return state_probabilities(model, grid, class2_di, fixed, options);
}

TwoStepPrediction predict_two_states(const Regressor& model, std::span<const ReferenceDi> class1_test_dis,
                                     const Class2DiProvider& class2_di_provider, std::span<const double> damage_grid,
                                     std::span<const double> load_grid, const QuantifyOptions& options) {
    require(static_cast<bool>(class2_di_provider), ErrorKind::invalid_argument, "no class-2 DI provider supplied");
    TwoStepPrediction out;
    DamageStepResult step1 = two_step_damage(model, class1_test_dis, damage_grid, load_grid, options);
    out.predicted_damage = step1.table.argmax_state.damage;
    out.step1_reference_load = step1.reference_load;
    out.step1_table = std::move(step1.table);
    const double class2_di = class2_di_provider(out.predicted_damage);
    out.step2_table = two_step_load(model, out.predicted_damage, class2_di, load_grid, options);
    out.predicted_load = *out.step2_table.argmax_state.load;
    return out;
}

}  // namespace gwquant
