#include "gwquant/report.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

#include "gwquant/error.hpp"
#include "gwquant/signal_csv.hpp"

namespace gwquant {

double quantile_sorted(std::span<const double> sorted, double p) {
    require(!sorted.empty(), ErrorKind::invalid_argument, "quantile of an empty sample");
    require(p >= 0.0 && p <= 1.0, ErrorKind::invalid_argument, "quantile level must lie in [0, 1]");
    const double h = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

BoxStats box_stats(std::span<const double> values) {
    require(!values.empty(), ErrorKind::invalid_argument, "box statistics of an empty sample");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    BoxStats stats;
    stats.count = sorted.size();
    stats.median = quantile_sorted(sorted, 0.5);
    stats.q25 = quantile_sorted(sorted, 0.25);
    stats.q75 = quantile_sorted(sorted, 0.75);
    const double iqr = stats.q75 - stats.q25;
    const double lo_fence = stats.q25 - 1.5 * iqr;
    const double hi_fence = stats.q75 + 1.5 * iqr;
    stats.lo_whisker = stats.q25;
    stats.hi_whisker = stats.q75;
    for (const double v : sorted) {
        if (v < lo_fence || v > hi_fence) {
            stats.outliers.push_back(v);
        } else {
            stats.lo_whisker = std::min(stats.lo_whisker, v);
            stats.hi_whisker = std::max(stats.hi_whisker, v);
        }
    }
    return stats;
}

SummaryReport summarize_predictions(std::span<const GridState> true_states, std::span<const GridState> predicted) {
    require(true_states.size() == predicted.size(), ErrorKind::dimension_mismatch,
            "true states and predictions differ in length");
    auto less = [](const GridState& a, const GridState& b) { return state_less(a, b); };
    std::map<GridState, std::pair<std::vector<double>, std::vector<double>>, decltype(less)> groups(less);
    SummaryReport report;
    for (std::size_t i = 0; i < true_states.size(); ++i) {
        const GridState& t = true_states[i];
        const GridState& p = predicted[i];
        PredictionError err;
        err.true_state = t;
        err.predicted_state = p;
        err.damage_error = p.damage - t.damage;
        if (t.load && p.load) {
            err.load_error = *p.load - *t.load;
        }
        report.errors.push_back(err);
        auto& group = groups[t];
        group.first.push_back(p.damage);
        if (t.load && p.load) {
            group.second.push_back(*p.load);
        }
    }
    for (const auto& [state, group] : groups) {
        StateSummary summary;
        summary.true_state = state;
        summary.damage = box_stats(group.first);
        if (!group.second.empty()) {
            summary.load = box_stats(group.second);
        }
        report.states.push_back(std::move(summary));
    }
    return report;
}

SummaryReport summarize_predictions(std::span<const GridState> true_states,
                                    std::span<const StateProbabilityTable> tables) {
    std::vector<GridState> predicted;
    predicted.reserve(tables.size());
    for (const StateProbabilityTable& t : tables) {
        predicted.push_back(t.argmax_state);
    }
    return summarize_predictions(true_states, std::span<const GridState>(predicted));
}

std::string format_state(const GridState& state) {
    std::string out = "damage=" + format_real(state.damage);
    if (state.load) {
        out += " load=" + format_real(*state.load);
    }
    return out;
}

namespace {

void write_box_row(std::ostream& out, const std::string& state, const char* quantity, const BoxStats& s) {
    out << state << ',' << quantity << ',' << s.count << ',' << format_real(s.median) << ',' << format_real(s.q25)
        << ',' << format_real(s.q75) << ',' << format_real(s.lo_whisker) << ',' << format_real(s.hi_whisker);
    for (const double v : s.outliers) {
        out << ',' << format_real(v);
    }
    out << '\n';
}

std::string optional_real(const std::optional<double>& v) {
    return v ? format_real(*v) : std::string();
}

}  // namespace

void write_boxplot_csv(std::ostream& out, const SummaryReport& report) {
    out << "state,quantity,count,median,q25,q75,lo_whisk,hi_whisk,outliers...\n";
    for (const StateSummary& s : report.states) {
        const std::string label = format_state(s.true_state);
        write_box_row(out, label, "damage", s.damage);
        if (s.load) {
            write_box_row(out, label, "load", *s.load);
        }
    }
}

void write_prediction_error_csv(std::ostream& out, const SummaryReport& report) {
    out << "true_damage,true_load,pred_damage,pred_load,err_damage,err_load\n";
    for (const PredictionError& e : report.errors) {
        out << format_real(e.true_state.damage) << ',' << optional_real(e.true_state.load) << ','
            << format_real(e.predicted_state.damage) << ',' << optional_real(e.predicted_state.load) << ','
            << format_real(e.damage_error) << ',' << optional_real(e.load_error) << '\n';
    }
}

}  // namespace gwquant
