#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "gwquant/signals.hpp"

namespace gwquant {

inline constexpr std::size_t kDefaultDiSamples = 2500;

enum class DiKind { rmsd, normalized };

/// How the normalized DI builds the baseline term. `projection` uses the
/// component of the normalized unknown along the baseline direction;
/// `as_written` divides by the baseline sample-by-sample.
enum class NormalizedMode { projection, as_written };

enum class ReferenceClass { class1, class2, single };

enum class ReferencePolicyKind { healthy_per_load, unloaded_per_damage, both_classes, fixed };

struct ReferencePolicy {
    ReferencePolicyKind kind = ReferencePolicyKind::healthy_per_load;
    /// Reference state for the fixed policy.
    double fixed_damage = 0.0;
    double fixed_load = 0.0;

    static ReferencePolicy healthy_per_load() { return {ReferencePolicyKind::healthy_per_load}; }
    static ReferencePolicy unloaded_per_damage() { return {ReferencePolicyKind::unloaded_per_damage}; }
    static ReferencePolicy both_classes() { return {ReferencePolicyKind::both_classes}; }
    static ReferencePolicy fixed(double damage, double load) {
        return {ReferencePolicyKind::fixed, damage, load};
    }
};

DiKind parse_di_kind(std::string_view text);
NormalizedMode parse_normalized_mode(std::string_view text);
ReferencePolicyKind parse_reference_policy(std::string_view text);
std::string_view to_string(DiKind kind);
std::string_view to_string(NormalizedMode mode);
std::string_view to_string(ReferencePolicyKind kind);

struct DiSettings {
    DiKind kind = DiKind::rmsd;
    NormalizedMode mode = NormalizedMode::projection;
    std::size_t n_use = kDefaultDiSamples;
};

/// Root-mean-square deviation over the first n_use samples.
double rmsd_di(std::span<const double> baseline, std::span<const double> unknown, std::size_t n_use);
double rmsd_di(const Signal& baseline, const Signal& unknown, std::size_t n_use);

double normalized_di(std::span<const double> baseline, std::span<const double> unknown, std::size_t n_use,
                     NormalizedMode mode = NormalizedMode::projection);
double normalized_di(const Signal& baseline, const Signal& unknown, std::size_t n_use,
                     NormalizedMode mode = NormalizedMode::projection);

double compute_di(std::span<const double> baseline, std::span<const double> unknown, const DiSettings& settings);

struct DiValue {
    double value = 0.0;
    StateLabel state;
    StateLabel reference_state;
    ReferenceClass reference_class = ReferenceClass::single;
};

/// Replicate-averaged reference waveforms keyed by (damage, load).
class ReferenceBank {
public:
    explicit ReferenceBank(std::span<const Signal> signals);

    [[nodiscard]] bool contains(double damage, double load) const;
    [[nodiscard]] std::size_t replicate_count(double damage, double load) const;

    /// Mean waveform of every replicate at the state. When `exclude_replicate`
    /// names one of them and at least one other replicate remains, that
    /// replicate is left out of the average.
    [[nodiscard]] std::vector<double> reference(double damage, double load,
                                                std::optional<int> exclude_replicate = std::nullopt) const;

    [[nodiscard]] std::vector<double> loads_at_damage(double damage) const;
    [[nodiscard]] std::vector<double> damages_at_load(double load) const;

private:
    struct Group {
        std::vector<double> sum;
        std::map<int, const Signal*> replicates;
    };
    const Group& group(double damage, double load) const;

    std::map<std::pair<double, double>, Group> groups_;
};

/// n x D inputs (damage [, load [, switch]]) and DI targets.
struct DiDataset {
    Eigen::MatrixXd inputs;
    Eigen::VectorXd targets;
    std::vector<std::string> column_names;

    [[nodiscard]] Eigen::Index size() const { return targets.size(); }
    [[nodiscard]] Eigen::Index dim() const { return inputs.cols(); }
    [[nodiscard]] std::optional<Eigen::Index> column(std::string_view name) const;

    /// Throws invalid-argument when the dataset breaks its invariants.
    void validate() const;
};

struct DiBuildResult {
    DiDataset dataset;
    std::vector<DiValue> values;
};

DiBuildResult build_di_dataset(std::span<const Signal> signals, const DiSettings& settings,
                               const ReferencePolicy& policy);

/// DI of `unknown` against the averaged reference at (damage, load); the
/// unknown's own replicate is excluded from the reference when it shares
/// the reference state.
double di_against_reference(const ReferenceBank& bank, const Signal& unknown, double ref_damage, double ref_load,
                            const DiSettings& settings);

}  // namespace gwquant
