#include "gwquant/damage_index.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "gwquant/error.hpp"
#include "gwquant/signal_csv.hpp"

namespace gwquant {

DiKind parse_di_kind(std::string_view text) {
    if (text == "rmsd") return DiKind::rmsd;
    if (text == "normalized") return DiKind::normalized;
    fail(ErrorKind::invalid_argument, "unknown DI kind '" + std::string(text) + "'");
}

NormalizedMode parse_normalized_mode(std::string_view text) {
    if (text == "projection") return NormalizedMode::projection;
    if (text == "as-written" || text == "as_written") return NormalizedMode::as_written;
    fail(ErrorKind::invalid_argument, "unknown normalized-DI mode '" + std::string(text) + "'");
}

ReferencePolicyKind parse_reference_policy(std::string_view text) {
    if (text == "class1") return ReferencePolicyKind::healthy_per_load;
    if (text == "class2") return ReferencePolicyKind::unloaded_per_damage;
    if (text == "both") return ReferencePolicyKind::both_classes;
    if (text == "fixed") return ReferencePolicyKind::fixed;
    fail(ErrorKind::invalid_argument, "unknown reference policy '" + std::string(text) + "'");
}

std::string_view to_string(DiKind kind) { return kind == DiKind::rmsd ? "rmsd" : "normalized"; }

std::string_view to_string(NormalizedMode mode) {
    return mode == NormalizedMode::projection ? "projection" : "as-written";
}

std::string_view to_string(ReferencePolicyKind kind) {
    switch (kind) {
        case ReferencePolicyKind::healthy_per_load: return "class1";
        case ReferencePolicyKind::unloaded_per_damage: return "class2";
        case ReferencePolicyKind::both_classes: return "both";
        case ReferencePolicyKind::fixed: return "fixed";
    }
    return "unknown";
}

namespace {

void check_lengths(std::size_t baseline, std::size_t unknown, std::size_t n_use) {
    require(n_use >= 1, ErrorKind::invalid_argument, "n_use must be >= 1");
    require(baseline >= n_use && unknown >= n_use, ErrorKind::invalid_argument,
            "signals shorter than n_use=" + std::to_string(n_use) + " (baseline " + std::to_string(baseline) +
                ", unknown " + std::to_string(unknown) + ")");
}

}  // namespace

double rmsd_di(std::span<const double> baseline, std::span<const double> unknown, std::size_t n_use) {
    check_lengths(baseline.size(), unknown.size(), n_use);
    double sum = 0.0;
    for (std::size_t t = 0; t < n_use; ++t) {
        const double d = baseline[t] - unknown[t];
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(n_use));
}

double rmsd_di(const Signal& baseline, const Signal& unknown, std::size_t n_use) {
    return rmsd_di(baseline.samples(), unknown.samples(), n_use);
}

double normalized_di(std::span<const double> baseline, std::span<const double> unknown, std::size_t n_use,
                     NormalizedMode mode) {
    check_lengths(baseline.size(), unknown.size(), n_use);
    double unknown_energy = 0.0;
    double baseline_energy = 0.0;
    for (std::size_t t = 0; t < n_use; ++t) {
        unknown_energy += unknown[t] * unknown[t];
        baseline_energy += baseline[t] * baseline[t];
    }
    require(unknown_energy > 0.0, ErrorKind::degenerate_signal, "unknown signal has zero energy");
    require(baseline_energy > 0.0, ErrorKind::degenerate_signal, "baseline signal has zero energy");

    const double unknown_norm = std::sqrt(unknown_energy);
    double cross = 0.0;  // sum_t y0[t] * Yu[t]
    double unknown_sum = 0.0;
    for (std::size_t t = 0; t < n_use; ++t) {
        const double yu = unknown[t] / unknown_norm;
        cross += baseline[t] * yu;
        unknown_sum += yu;
    }

    double baseline_sum = 0.0;
    if (mode == NormalizedMode::projection) {
        const double coefficient = cross / baseline_energy;
        for (std::size_t t = 0; t < n_use; ++t) baseline_sum += baseline[t] * coefficient;
    } else {
        for (std::size_t t = 0; t < n_use; ++t) {
            require(baseline[t] != 0.0, ErrorKind::division_by_zero,
                    "baseline sample " + std::to_string(t) + " is zero (as-written normalized DI)");
            baseline_sum += cross / (baseline[t] * baseline_energy);
        }
    }
    return unknown_sum - baseline_sum;
}

double normalized_di(const Signal& baseline, const Signal& unknown, std::size_t n_use, NormalizedMode mode) {
    return normalized_di(baseline.samples(), unknown.samples(), n_use, mode);
}

double compute_di(std::span<const double> baseline, std::span<const double> unknown, const DiSettings& settings) {
    return settings.kind == DiKind::rmsd ? rmsd_di(baseline, unknown, settings.n_use)
                                         : normalized_di(baseline, unknown, settings.n_use, settings.mode);
}

ReferenceBank::ReferenceBank(std::span<const Signal> signals) {
    for (const auto& s : signals) {
        auto& g = groups_[{s.state().damage_size, s.state().load}];
        if (g.sum.empty()) {
            g.sum.assign(s.size(), 0.0);
        } else {
            require(g.sum.size() == s.size(), ErrorKind::invalid_argument,
                    "replicates at damage=" + format_real(s.state().damage_size) +
                        " load=" + format_real(s.state().load) + " differ in length");
        }
        require(g.replicates.emplace(s.state().replicate, &s).second, ErrorKind::invalid_argument,
                "duplicate signal at damage=" + format_real(s.state().damage_size) +
                    " load=" + format_real(s.state().load) + " replicate=" + std::to_string(s.state().replicate));
        const auto samples = s.samples();
        for (std::size_t t = 0; t < samples.size(); ++t) g.sum[t] += samples[t];
    }
}

bool ReferenceBank::contains(double damage, double load) const { return groups_.contains({damage, load}); }

std::size_t ReferenceBank::replicate_count(double damage, double load) const {
    auto it = groups_.find({damage, load});
    return it == groups_.end() ? 0 : it->second.replicates.size();
}

const ReferenceBank::Group& ReferenceBank::group(double damage, double load) const {
    auto it = groups_.find({damage, load});
    if (it == groups_.end()) {
        fail(ErrorKind::missing_baseline,
             "missing reference signal for state damage=" + format_real(damage) + " load=" + format_real(load));
    }
    return it->second;
}

std::vector<double> ReferenceBank::reference(double damage, double load, std::optional<int> exclude_replicate) const {
    const Group& g = group(damage, load);
    std::vector<double> mean = g.sum;
    double count = static_cast<double>(g.replicates.size());
    if (exclude_replicate && g.replicates.size() > 1) {
        if (auto it = g.replicates.find(*exclude_replicate); it != g.replicates.end()) {
            const auto samples = it->second->samples();
            for (std::size_t t = 0; t < mean.size(); ++t) mean[t] -= samples[t];
            count -= 1.0;
        }
    }
    for (double& v : mean) v /= count;
    return mean;
}

std::vector<double> ReferenceBank::loads_at_damage(double damage) const {
    std::vector<double> loads;
    for (const auto& [key, g] : groups_) {
        if (key.first == damage) loads.push_back(key.second);
    }
    return loads;
}

std::vector<double> ReferenceBank::damages_at_load(double load) const {
    std::vector<double> damages;
    for (const auto& [key, g] : groups_) {
        if (key.second == load) damages.push_back(key.first);
    }
    return damages;
}

double di_against_reference(const ReferenceBank& bank, const Signal& unknown, double ref_damage, double ref_load,
                            const DiSettings& settings) {
    const auto& st = unknown.state();
    std::optional<int> exclude;
    if (st.damage_size == ref_damage && st.load == ref_load) exclude = st.replicate;
    const std::vector<double> ref = bank.reference(ref_damage, ref_load, exclude);
    return compute_di(ref, unknown.samples(), settings);
}

std::optional<Eigen::Index> DiDataset::column(std::string_view name) const {
    for (std::size_t i = 0; i < column_names.size(); ++i) {
        if (column_names[i] == name) return static_cast<Eigen::Index>(i);
    }
    return std::nullopt;
}

void DiDataset::validate() const {
    require(inputs.rows() == targets.size(), ErrorKind::dimension_mismatch, "inputs/targets row count mismatch");
    require(static_cast<std::size_t>(inputs.cols()) == column_names.size(), ErrorKind::dimension_mismatch,
            "column_names do not match input dimension");
    require(inputs.cols() >= 1 && inputs.cols() <= 3, ErrorKind::invalid_argument, "DI dataset must have 1-3 inputs");
    require(targets.size() >= 2, ErrorKind::invalid_argument, "DI dataset needs at least 2 rows");
    require(inputs.allFinite() && targets.allFinite(), ErrorKind::invalid_argument, "DI dataset has non-finite entries");
    if (inputs.cols() == 3) {
        for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
            const double s = inputs(i, 2);
            require(s == 1.0 || s == 2.0, ErrorKind::invalid_argument, "switch covariate must be 1 or 2");
        }
    }
}

DiBuildResult build_di_dataset(std::span<const Signal> signals, const DiSettings& settings,
                               const ReferencePolicy& policy) {
    require(!signals.empty(), ErrorKind::invalid_argument, "no signals supplied");
    const ReferenceBank bank(signals);

    std::vector<const Signal*> ordered;
    ordered.reserve(signals.size());
    for (const auto& s : signals) ordered.push_back(&s);
    std::stable_sort(ordered.begin(), ordered.end(), [](const Signal* a, const Signal* b) {
        return compare_states(a->state(), b->state()) < 0;
    });

    std::set<double> loads;
    for (const auto& s : signals) loads.insert(s.state().load);

    DiBuildResult result;
    auto emit = [&](const Signal& unknown, double ref_damage, double ref_load, ReferenceClass cls) {
        DiValue v;
        v.value = di_against_reference(bank, unknown, ref_damage, ref_load, settings);
        v.state = unknown.state();
        v.reference_class = cls;
        v.reference_state = StateLabel{ref_damage, ref_load, -1, ref_damage == 0.0 ? SignalRole::baseline
                                                                                    : SignalRole::test};
        result.values.push_back(v);
    };

    const bool class1 = policy.kind == ReferencePolicyKind::healthy_per_load ||
                        policy.kind == ReferencePolicyKind::both_classes;
    const bool class2 = policy.kind == ReferencePolicyKind::unloaded_per_damage ||
                        policy.kind == ReferencePolicyKind::both_classes;
    const bool both = policy.kind == ReferencePolicyKind::both_classes;

    if (policy.kind == ReferencePolicyKind::fixed) {
        for (const Signal* s : ordered) emit(*s, policy.fixed_damage, policy.fixed_load, ReferenceClass::single);
    }
    if (class1) {
        for (const Signal* s : ordered) emit(*s, 0.0, s->state().load, ReferenceClass::class1);
    }
    if (class2) {
        for (const Signal* s : ordered) emit(*s, s->state().damage_size, 0.0, ReferenceClass::class2);
    }

    const Eigen::Index dim = both ? 3 : (loads.size() > 1 ? 2 : 1);
    auto& ds = result.dataset;
    ds.inputs.resize(static_cast<Eigen::Index>(result.values.size()), dim);
    ds.targets.resize(static_cast<Eigen::Index>(result.values.size()));
    ds.column_names = {"damage"};
    if (dim >= 2) ds.column_names.emplace_back("load");
    if (dim == 3) ds.column_names.emplace_back("switch");
    for (std::size_t i = 0; i < result.values.size(); ++i) {
        const auto& v = result.values[i];
        const auto row = static_cast<Eigen::Index>(i);
        ds.inputs(row, 0) = v.state.damage_size;
        if (dim >= 2) ds.inputs(row, 1) = v.state.load;
        if (dim == 3) ds.inputs(row, 2) = v.reference_class == ReferenceClass::class1 ? 1.0 : 2.0;
        ds.targets(row) = v.value;
    }
    ds.validate();
    return result;
}

}  // namespace gwquant
