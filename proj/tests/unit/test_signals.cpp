#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "gwquant/error.hpp"
#include "gwquant/signal_csv.hpp"
#include "gwquant/signals.hpp"

namespace gwquant {
namespace {

SimulationConfig quiet_config() {
    SimulationConfig c;
    c.noise_floor_std = 0.0;
    c.heteroscedastic_noise_slope = 0.0;
    c.n_replicates = 1;
    return c;
}

TEST(ToneBurst, ZeroAmplitudeIsAllZero) {
    const Signal s = tone_burst(250e3, 5, 0.0, 24e6, 2500);
    for (double v : s.samples()) EXPECT_EQ(v, 0.0);
}

TEST(ToneBurst, OccupiesNCyclesTimesFsOverFc) {
    const Signal s = tone_burst(250e3, 5, 1.0, 24e6, 2500);
    ASSERT_EQ(s.size(), 2500u);
    EXPECT_EQ(burst_length(250e3, 5, 24e6), 480u);
    double head = 0.0;
    for (std::size_t t = 0; t < 480; ++t) head = std::max(head, std::abs(s.samples()[t]));
    EXPECT_GT(head, 0.5);
    for (std::size_t t = 480; t < 2500; ++t) EXPECT_EQ(s.samples()[t], 0.0) << "t=" << t;
}

TEST(ToneBurst, EnergyMatchesDirectSummation) {
    const double amplitude = 1.7;
    const Signal s = tone_burst(250e3, 5, amplitude, 24e6, 600);
    // Brute-force sum of amplitude^2 w[t]^2 sin^2(2 pi fc t / fs) over the burst.
    double expected = 0.0;
    const int length = 480;
    for (int t = 0; t < length; ++t) {
        const double w = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * t / (length - 1));
        const double sn = std::sin(2.0 * std::numbers::pi * 250e3 * t / 24e6);
        expected += amplitude * amplitude * w * w * sn * sn;
    }
    double energy = 0.0;
    for (double v : s.samples()) energy += v * v;
    EXPECT_NEAR(energy, expected, 1e-12 * expected);
}

TEST(ToneBurst, RejectsViolatedPreconditions) {
    EXPECT_THROW(tone_burst(0.0, 5, 1.0, 24e6, 2500), Error);
    EXPECT_THROW(tone_burst(250e3, 5, 1.0, 400e3, 2500), Error);
    EXPECT_THROW(tone_burst(250e3, 5, 1.0, 24e6, 479), Error);
    EXPECT_NO_THROW(tone_burst(250e3, 5, 1.0, 24e6, 480));
}

TEST(Simulate, IdentityPropagationAtHealthyUnloadedState) {
    const SimulationConfig c = quiet_config();
    const std::vector<double> zero{0.0};
    const auto signals = simulate_dataset(c, zero, zero);
    ASSERT_EQ(signals.size(), 1u);
    const Signal burst = tone_burst(c.center_frequency, c.n_cycles, c.burst_amplitude, c.sample_rate, c.n_samples);
    const auto shift = static_cast<std::size_t>(std::llround(c.path_delay * c.sample_rate));
    for (std::size_t t = 0; t < signals[0].size(); ++t) {
        const double expected = t >= shift ? burst.samples()[t - shift] : 0.0;
        ASSERT_EQ(signals[0].samples()[t], expected) << "t=" << t;
    }
    EXPECT_EQ(signals[0].state().role, SignalRole::baseline);
}

TEST(Simulate, SameSeedIsBitIdentical) {
    SimulationConfig c;
    c.n_replicates = 3;
    const std::vector<double> d{0.0, 2.0};
    const std::vector<double> l{0.0, 1.0};
    EXPECT_EQ(simulate_dataset(c, d, l), simulate_dataset(c, d, l));
    SimulationConfig other = c;
    other.rng_seed = c.rng_seed + 1;
    EXPECT_NE(simulate_dataset(c, d, l), simulate_dataset(other, d, l));
}

TEST(Simulate, AttenuationRatioMatchesClosedForm) {
    SimulationConfig c = quiet_config();
    c.damage_delay_coeff = 0.0;
    const std::vector<double> d{0.0, 3.0, 7.0};
    const std::vector<double> l{0.0};
    const auto signals = simulate_dataset(c, d, l);
    auto peak = [](const Signal& s) {
        double m = 0.0;
        for (double v : s.samples()) m = std::max(m, std::abs(v));
        return m;
    };
    const double base = peak(signals[0]);
    EXPECT_NEAR(peak(signals[1]) / base, std::exp(-c.damage_attenuation_coeff * 3.0), 1e-12);
    EXPECT_NEAR(peak(signals[2]) / base, std::exp(-c.damage_attenuation_coeff * 7.0), 1e-12);
    EXPECT_GT(peak(signals[0]), peak(signals[1]));
    EXPECT_GT(peak(signals[1]), peak(signals[2]));
}

TEST(Simulate, OrderingIsDamageMajorThenLoadThenReplicate) {
    SimulationConfig c;
    c.n_replicates = 2;
    const std::vector<double> d{0.0, 1.0};
    const std::vector<double> l{0.0, 5.0};
    const auto s = simulate_dataset(c, d, l);
    ASSERT_EQ(s.size(), 8u);
    EXPECT_EQ(s[0].state().damage_size, 0.0);
    EXPECT_EQ(s[1].state().replicate, 1);
    EXPECT_EQ(s[2].state().load, 5.0);
    EXPECT_EQ(s[4].state().damage_size, 1.0);
    EXPECT_EQ(s[4].state().role, SignalRole::test);
}

TEST(Simulate, ReplicateNoiseStdConvergesToFloorPlusSlope) {
    SimulationConfig c;
    c.n_replicates = 200;
    c.n_samples = 2500;
    c.noise_floor_std = 0.01;
    c.heteroscedastic_noise_slope = 0.005;
    const std::vector<double> d{4.0};
    const std::vector<double> l{0.0};
    const auto signals = simulate_dataset(c, d, l);
    const double expected = c.noise_floor_std + c.heteroscedastic_noise_slope * 4.0;
    const std::size_t index = 2000;  // after the burst: pure noise
    double mean = 0.0;
    for (const Signal& s : signals) mean += s.samples()[index];
    mean /= static_cast<double>(signals.size());
    double var = 0.0;
    for (const Signal& s : signals) var += std::pow(s.samples()[index] - mean, 2);
    const double sd = std::sqrt(var / static_cast<double>(signals.size() - 1));
    const double se = expected / std::sqrt(2.0 * static_cast<double>(signals.size() - 1));
    EXPECT_NEAR(sd, expected, 3.0 * se);
}

TEST(Simulate, CrosstalkBlankingZeroesLeadingSamples) {
    SimulationConfig c;
    c.crosstalk_blank_samples = 100;
    c.n_replicates = 1;
    const std::vector<double> d{1.0};
    const std::vector<double> l{0.0};
    const auto s = simulate_dataset(c, d, l);
    for (std::size_t t = 0; t < 100; ++t) EXPECT_EQ(s[0].samples()[t], 0.0);
    EXPECT_NE(s[0].samples()[100], 0.0);
}

TEST(Simulate, RejectsBadGrids) {
    SimulationConfig c;
    const std::vector<double> empty;
    const std::vector<double> ok{0.0};
    const std::vector<double> unsorted{1.0, 0.5};
    const std::vector<double> negative{-1.0};
    EXPECT_THROW(simulate_dataset(c, empty, ok), Error);
    EXPECT_THROW(simulate_dataset(c, unsorted, ok), Error);
    EXPECT_THROW(simulate_dataset(c, ok, negative), Error);
    c.noise_floor_std = -1.0;
    EXPECT_THROW(simulate_dataset(c, ok, ok), Error);
}

TEST(SignalCsv, RoundTripIsLossless) {
    SimulationConfig c;
    c.n_replicates = 2;
    c.n_samples = 600;
    const std::vector<double> d{0.0, 1.5};
    const std::vector<double> l{0.0, 2.25};
    const auto signals = simulate_dataset(c, d, l);
    std::stringstream buffer;
    write_signals_csv(buffer, signals, 7);
    EXPECT_NE(buffer.str().find("# gwquant seed=7"), std::string::npos);
    const auto back = read_signals_csv(buffer);
    EXPECT_EQ(back, signals);
}

TEST(SignalCsv, ThreeSectionsParseWithLabels) {
    std::stringstream in(
        "# signal damage=0 load=0 replicate=0 role=baseline sample_rate=10\n1\n2\n\n"
        "# signal damage=2.5 load=1 replicate=3 role=test sample_rate=10\n0.5\n\n"
        "# signal damage=5 load=2 replicate=1 role=test sample_rate=10\n-1e-3\n4\n");
    const auto s = read_signals_csv(in);
    ASSERT_EQ(s.size(), 3u);
    EXPECT_EQ(s[0].state().role, SignalRole::baseline);
    EXPECT_EQ(s[1].state().damage_size, 2.5);
    EXPECT_EQ(s[1].state().replicate, 3);
    EXPECT_EQ(s[2].state().load, 2.0);
    EXPECT_EQ(s[2].samples()[0], -1e-3);
}

TEST(SignalCsv, EmptySectionNamesHeader) {
    std::stringstream in(
        "# signal damage=0 load=0 replicate=0 role=baseline sample_rate=10\n\n"
        "# signal damage=1 load=0 replicate=0 role=test sample_rate=10\n1\n");
    try {
        (void)read_signals_csv(in, "fixture.csv");
        FAIL() << "expected parse error";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::parse);
        EXPECT_NE(std::string(e.what()).find("damage=0 load=0"), std::string::npos) << e.what();
    }
}

TEST(SignalCsv, MalformedInputReportsLineOrSchema) {
    std::stringstream bad_number("# signal damage=0 load=0 replicate=0 role=baseline sample_rate=10\n1\nabc\n");
    try {
        (void)read_signals_csv(bad_number, "f.csv");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::parse);
        EXPECT_NE(std::string(e.what()).find(":3"), std::string::npos) << e.what();
    }
    std::stringstream missing("# signal damage=0 load=0 replicate=0 sample_rate=10\n1\n");
    try {
        (void)read_signals_csv(missing);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::schema);
    }
    std::stringstream unknown("# signal damage=0 load=0 replicate=0 role=test sample_rate=10 color=red\n1\n");
    EXPECT_THROW((void)read_signals_csv(unknown), Error);
}

}  // namespace
}  // namespace gwquant
