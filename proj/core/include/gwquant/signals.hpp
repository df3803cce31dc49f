#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace gwquant {

enum class SignalRole { baseline, test };

std::string_view to_string(SignalRole role);
SignalRole parse_signal_role(std::string_view text);

/// Structural state a signal was acquired in. damage_size is in mm for
/// notches or a count for attached masses; load is in kN.
struct StateLabel {
    double damage_size = 0.0;
    double load = 0.0;
    int replicate = 0;
    SignalRole role = SignalRole::test;

    friend bool operator==(const StateLabel&, const StateLabel&) = default;
};

/// Lexicographic (damage, load, replicate) ordering; role does not participate.
std::weak_ordering compare_states(const StateLabel& a, const StateLabel& b);

/// Uniformly sampled sensor waveform. Samples are finite and non-empty and
/// the sample rate is strictly positive; the constructor enforces both.
class Signal {
public:
    Signal(std::vector<double> samples, double sample_rate, StateLabel state);

    [[nodiscard]] std::span<const double> samples() const noexcept { return samples_; }
    [[nodiscard]] std::size_t size() const noexcept { return samples_.size(); }
    [[nodiscard]] double sample_rate() const noexcept { return sample_rate_; }
    [[nodiscard]] const StateLabel& state() const noexcept { return state_; }

    void set_state(const StateLabel& state) { state_ = state; }

    friend bool operator==(const Signal&, const Signal&) = default;

private:
    std::vector<double> samples_;
    double sample_rate_;
    StateLabel state_;
};

struct SimulationConfig {
    double center_frequency = 250e3;      // Hz
    int n_cycles = 5;
    double burst_amplitude = 1.0;
    double sample_rate = 24e6;            // Hz
    double path_delay = 20e-6;            // s
    double damage_attenuation_coeff = 0.05;
    double damage_delay_coeff = 5e-9;     // s per unit damage
    double load_delay_coeff = 0.1e-6;     // s per kN
    double noise_floor_std = 0.01;
    double heteroscedastic_noise_slope = 0.002;
    int n_samples = 2500;
    int n_replicates = 20;
    std::uint64_t rng_seed = 42;
    int crosstalk_blank_samples = 0;

    /// Throws invalid-argument when any field violates its documented range.
    void validate() const;
};

/// Hamming-windowed sinusoid of n_cycles cycles at the head of an
/// n_samples buffer; zero elsewhere.
Signal tone_burst(double center_frequency, int n_cycles, double amplitude, double sample_rate,
                  int n_samples);

/// Number of samples a burst occupies: round(n_cycles * fs / fc).
std::size_t burst_length(double center_frequency, int n_cycles, double sample_rate);

/// Integer-sample delay (nearest-sample rounding) applied for a state.
std::ptrdiff_t propagation_delay_samples(const SimulationConfig& config, double damage, double load);

/// One received signal per (damage, load, replicate), damage-major order.
/// Healthy (damage = 0) signals carry the baseline role.
std::vector<Signal> simulate_dataset(const SimulationConfig& config, std::span<const double> damage_grid,
                                     std::span<const double> load_grid);

}  // namespace gwquant
