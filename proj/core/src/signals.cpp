#include "gwquant/signals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "gwquant/error.hpp"

namespace gwquant {

std::string_view to_string(SignalRole role) {
    return role == SignalRole::baseline ? "baseline" : "test";
}

SignalRole parse_signal_role(std::string_view text) {
    if (text == "baseline") return SignalRole::baseline;
    if (text == "test") return SignalRole::test;
    fail(ErrorKind::parse, "unknown signal role '" + std::string(text) + "'");
}

std::weak_ordering compare_states(const StateLabel& a, const StateLabel& b) {
    if (auto c = std::weak_order(a.damage_size, b.damage_size); c != 0) return c;
    if (auto c = std::weak_order(a.load, b.load); c != 0) return c;
    return a.replicate <=> b.replicate;
}

Signal::Signal(std::vector<double> samples, double sample_rate, StateLabel state)
    : samples_(std::move(samples)), sample_rate_(sample_rate), state_(state) {
    require(!samples_.empty(), ErrorKind::invalid_argument, "signal has no samples");
    require(std::all_of(samples_.begin(), samples_.end(), [](double v) { return std::isfinite(v); }),
            ErrorKind::invalid_argument, "signal contains non-finite samples");
    require(std::isfinite(sample_rate_) && sample_rate_ > 0.0, ErrorKind::invalid_argument,
            "sample_rate must be positive");
}

void SimulationConfig::validate() const {
    auto finite = [](double v) { return std::isfinite(v); };
    require(finite(center_frequency) && center_frequency > 0.0, ErrorKind::invalid_argument,
            "center_frequency must be positive");
    require(finite(sample_rate) && sample_rate > 2.0 * center_frequency, ErrorKind::invalid_argument,
            "sample_rate must exceed twice the center frequency");
    require(n_cycles >= 1, ErrorKind::invalid_argument, "n_cycles must be >= 1");
    require(n_samples >= 1, ErrorKind::invalid_argument, "n_samples must be >= 1");
    require(n_replicates >= 1, ErrorKind::invalid_argument, "n_replicates must be >= 1");
    require(finite(burst_amplitude) && finite(path_delay) && finite(damage_attenuation_coeff) &&
                finite(damage_delay_coeff) && finite(load_delay_coeff),
            ErrorKind::invalid_argument, "simulation coefficients must be finite");
    require(finite(noise_floor_std) && noise_floor_std >= 0.0, ErrorKind::invalid_argument,
            "noise_floor_std must be >= 0");
    require(finite(heteroscedastic_noise_slope) && heteroscedastic_noise_slope >= 0.0,
            ErrorKind::invalid_argument, "heteroscedastic_noise_slope must be >= 0");
    require(crosstalk_blank_samples >= 0, ErrorKind::invalid_argument,
            "crosstalk_blank_samples must be >= 0");
}

std::size_t burst_length(double center_frequency, int n_cycles, double sample_rate) {
    return static_cast<std::size_t>(std::llround(n_cycles * sample_rate / center_frequency));
}

Signal tone_burst(double center_frequency, int n_cycles, double amplitude, double sample_rate,
                  int n_samples) {
    require(std::isfinite(center_frequency) && center_frequency > 0.0, ErrorKind::invalid_argument,
            "center_frequency must be positive");
    require(std::isfinite(sample_rate) && sample_rate > 2.0 * center_frequency,
            ErrorKind::invalid_argument, "sample_rate must exceed twice the center frequency");
    require(n_cycles >= 1, ErrorKind::invalid_argument, "n_cycles must be >= 1");
    require(std::isfinite(amplitude), ErrorKind::invalid_argument, "amplitude must be finite");
    const double needed = std::ceil(n_cycles * sample_rate / center_frequency - 1e-9);
    require(n_samples >= 1 && static_cast<double>(n_samples) >= needed, ErrorKind::invalid_argument,
            "n_samples too small to hold the burst (" + std::to_string(static_cast<long>(needed)) +
                " required)");

    const std::size_t length = burst_length(center_frequency, n_cycles, sample_rate);
    std::vector<double> samples(static_cast<std::size_t>(n_samples), 0.0);
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t t = 0; t < length; ++t) {
        const double window =
            length > 1 ? 0.54 - 0.46 * std::cos(two_pi * static_cast<double>(t) / static_cast<double>(length - 1))
                       : 1.0;
        samples[t] = amplitude * window * std::sin(two_pi * center_frequency * static_cast<double>(t) / sample_rate);
    }
    return Signal(std::move(samples), sample_rate, StateLabel{});
}

std::ptrdiff_t propagation_delay_samples(const SimulationConfig& config, double damage, double load) {
    const double delay = config.path_delay + config.damage_delay_coeff * damage + config.load_delay_coeff * load;
    return static_cast<std::ptrdiff_t>(std::llround(delay * config.sample_rate));
}

namespace {

void check_grid(std::span<const double> grid, const char* name) {
    require(!grid.empty(), ErrorKind::invalid_argument, std::string(name) + " is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        require(std::isfinite(grid[i]) && grid[i] >= 0.0, ErrorKind::invalid_argument,
                std::string(name) + " entries must be finite and non-negative");
        if (i > 0) {
            require(grid[i] > grid[i - 1], ErrorKind::invalid_argument,
                    std::string(name) + " must be strictly increasing");
        }
    }
}

}  // namespace

std::vector<Signal> simulate_dataset(const SimulationConfig& config, std::span<const double> damage_grid,
                                     std::span<const double> load_grid) {
    config.validate();
    check_grid(damage_grid, "damage_grid");
    check_grid(load_grid, "load_grid");

    const Signal burst = tone_burst(config.center_frequency, config.n_cycles, config.burst_amplitude,
                                    config.sample_rate, config.n_samples);
    const auto pulse = burst.samples().first(burst_length(config.center_frequency, config.n_cycles,
                                                          config.sample_rate));
    const auto n = static_cast<std::ptrdiff_t>(config.n_samples);

    std::mt19937_64 rng(config.rng_seed);
    std::normal_distribution<double> standard_normal(0.0, 1.0);

    std::vector<Signal> out;
    out.reserve(damage_grid.size() * load_grid.size() * static_cast<std::size_t>(config.n_replicates));
    for (double damage : damage_grid) {
        const double scale = std::exp(-config.damage_attenuation_coeff * damage);
        const double noise_std = config.noise_floor_std + config.heteroscedastic_noise_slope * damage;
        for (double load : load_grid) {
            const std::ptrdiff_t delay = propagation_delay_samples(config, damage, load);
            std::vector<double> clean(static_cast<std::size_t>(n), 0.0);
            for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(pulse.size()); ++k) {
                const std::ptrdiff_t t = k + delay;
                if (t >= 0 && t < n) clean[static_cast<std::size_t>(t)] = scale * pulse[static_cast<std::size_t>(k)];
            }
            for (int r = 0; r < config.n_replicates; ++r) {
                std::vector<double> samples = clean;
                if (noise_std > 0.0) {
                    for (double& v : samples) v += noise_std * standard_normal(rng);
                }
                const auto blank = std::min<std::size_t>(static_cast<std::size_t>(config.crosstalk_blank_samples),
                                                         samples.size());
                std::fill_n(samples.begin(), blank, 0.0);
                StateLabel state{damage, load, r, damage == 0.0 ? SignalRole::baseline : SignalRole::test};
                out.emplace_back(std::move(samples), config.sample_rate, state);
            }
        }
    }
    return out;
}

}  // namespace gwquant
