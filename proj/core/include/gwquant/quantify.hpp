#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "gwquant/regressor.hpp"

namespace gwquant {

/// Candidate structural state: a damage size and, for multi-input models,
/// a load.
struct GridState {
    double damage = 0.0;
    std::optional<double> load;

    friend bool operator==(const GridState&, const GridState&) = default;
};

bool state_less(const GridState& a, const GridState& b);

/// Unique candidate states sorted by damage, then load.
class StateGrid {
public:
    StateGrid() = default;
    explicit StateGrid(std::vector<GridState> states, std::string source = {});

    /// Unique (damage[, load]) combinations among the training rows. When
    /// `switch_value` is set only rows carrying that switch covariate count.
    static StateGrid from_training_inputs(const Eigen::Ref<const Eigen::MatrixXd>& inputs, bool include_load,
                                          std::optional<double> switch_value = std::nullopt);
    static StateGrid damages(std::span<const double> damage_values);
    static StateGrid product(std::span<const double> damage_values, std::span<const double> load_values);

    /// Inserts `k` evenly spaced damage values between consecutive training
    /// damages (per load when loads are present).
    [[nodiscard]] StateGrid refined(int k) const;

    [[nodiscard]] const std::vector<GridState>& states() const { return states_; }
    [[nodiscard]] std::size_t size() const { return states_.size(); }
    [[nodiscard]] bool empty() const { return states_.empty(); }
    [[nodiscard]] const std::string& source() const { return source_; }

private:
    std::vector<GridState> states_;
    std::string source_;
};

/// Covariates appended to every candidate state when querying the model.
struct FixedCovariates {
    std::optional<double> load;
    std::optional<double> switch_value;
};

struct QuantifyOptions {
    /// Interval half-width in units of the closest training point's predictive std.
    double interval_sigmas = 2.0;
    /// Max probability below this marks the decision unreliable.
    double low_confidence_threshold = 0.05;
    /// A runner-up state reaching this fraction of the max probability also
    /// marks the decision unreliable. Values above 1 disable the check.
    double ambiguity_ratio = 0.5;
};

struct StateProbability {
    GridState state;
    double probability = 0.0;
    double mean = 0.0;
    double variance = 0.0;
};

struct StateProbabilityTable {
    std::vector<StateProbability> entries;
    double test_di = 0.0;
    double closest_training_di = 0.0;
    double closest_variance = 0.0;
    Eigen::Index closest_row = -1;
    double interval_lower = 0.0;
    double interval_upper = 0.0;
    GridState argmax_state;
    double max_probability = 0.0;
    bool low_confidence = false;
};

/// Phi((s - mean) / sqrt(variance)) via erfc.
double gaussian_cdf(double s, double mean, double variance);

/// F(b) - F(a), evaluated on the tail that avoids cancellation.
double gaussian_interval_probability(double a, double b, double mean, double variance);

/// Probability that `test_di` came from each candidate state: the mass of
/// [test_di - 2 sqrt(V_closest), test_di + 2 sqrt(V_closest)] under the
/// model's predictive distribution at that state, where V_closest is the
/// predictive variance at the training row whose target is nearest to
/// test_di. With fixed covariates, only rows carrying those covariates are
/// searched for the nearest target (all rows if none match).
StateProbabilityTable state_probabilities(const Regressor& model, const StateGrid& grid, double test_di,
                                          const FixedCovariates& fixed = {}, const QuantifyOptions& options = {});

/// Damage-only quantification, optionally at a known load.
StateProbabilityTable predict_single_state(const Regressor& model, const StateGrid& damage_grid, double test_di,
                                           std::optional<double> known_load = std::nullopt,
                                           const QuantifyOptions& options = {});

struct ReferenceDi {
    double reference_load = 0.0;
    double di = 0.0;
};

struct TwoStepPrediction {
    double predicted_damage = 0.0;
    double predicted_load = 0.0;
    StateProbabilityTable step1_table;
    StateProbabilityTable step2_table;
    double step1_reference_load = 0.0;
};

struct DamageStepResult {
    StateProbabilityTable table;
    double reference_load = 0.0;
};

/// Step 1: every class-1 DI against the damage x load grid with switch = 1;
/// the single most probable (damage, load) pair wins and only its damage is kept.
DamageStepResult two_step_damage(const Regressor& model, std::span<const ReferenceDi> class1_test_dis,
                                 std::span<const double> damage_grid, std::span<const double> load_grid,
                                 const QuantifyOptions& options = {});

/// Step 2: the class-2 DI at the predicted damage against the load grid with switch = 2.
StateProbabilityTable two_step_load(const Regressor& model, double predicted_damage, double class2_di,
                                    std::span<const double> load_grid, const QuantifyOptions& options = {});

using Class2DiProvider = std::function<double(double damage)>;

TwoStepPrediction predict_two_states(const Regressor& model, std::span<const ReferenceDi> class1_test_dis,
                                     const Class2DiProvider& class2_di_provider, std::span<const double> damage_grid,
                                     std::span<const double> load_grid, const QuantifyOptions& options = {});

}  // namespace gwquant
