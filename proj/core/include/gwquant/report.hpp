#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gwquant/quantify.hpp"

namespace gwquant {

/// Linear-interpolation quantile (Hyndman-Fan type 7) of sorted values.
double quantile_sorted(std::span<const double> sorted, double p);

/// Box-plot statistics: quartiles, Tukey whiskers (most extreme data within
/// 1.5 IQR of the box) and the points beyond them.
struct BoxStats {
    std::size_t count = 0;
    double median = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
    double lo_whisker = 0.0;
    double hi_whisker = 0.0;
    std::vector<double> outliers;
};

BoxStats box_stats(std::span<const double> values);

struct StateSummary {
    GridState true_state;
    BoxStats damage;
    std::optional<BoxStats> load;
};

struct PredictionError {
    GridState true_state;
    GridState predicted_state;
    double damage_error = 0.0;
    std::optional<double> load_error;
};

struct SummaryReport {
    std::vector<StateSummary> states;
    std::vector<PredictionError> errors;
};

/// Groups argmax predictions by true state (sorted) and records signed
/// errors (predicted - true) in input order.
SummaryReport summarize_predictions(std::span<const GridState> true_states, std::span<const GridState> predicted);
SummaryReport summarize_predictions(std::span<const GridState> true_states,
                                    std::span<const StateProbabilityTable> tables);

std::string format_state(const GridState& state);

// Box-plot CSV: `state,quantity,count,median,q25,q75,lo_whisk,hi_whisk,outliers...`
void write_boxplot_csv(std::ostream& out, const SummaryReport& report);
// Error CSV: `true_damage,true_load,pred_damage,pred_load,err_damage,err_load`
void write_prediction_error_csv(std::ostream& out, const SummaryReport& report);

}  // namespace gwquant
