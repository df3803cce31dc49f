#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "gwquant/config.hpp"
#include "gwquant/error.hpp"
#include "gwquant/split.hpp"

namespace gwquant {
namespace {

Eigen::MatrixXd replicated_states(int states, int reps) {
    Eigen::MatrixXd x(states * reps, 2);
    for (int s = 0; s < states; ++s)
        for (int r = 0; r < reps; ++r) x.row(s * reps + r) << s, s % 2;
    return x;
}

TEST(StratifiedSplit, HalfSplitCountsPerState) {
    const Eigen::MatrixXd x = replicated_states(5, 20);
    std::mt19937_64 rng(1);
    const TrainTestSplit split = stratified_split(x, 0.5, rng);
    EXPECT_EQ(split.train_rows.size(), 50u);
    EXPECT_EQ(split.test_rows.size(), 50u);  // total - ceil(0.5 total)
    std::map<double, int> held;
    for (auto r : split.test_rows) ++held[x(r, 0)];
    for (const auto& [state, count] : held) EXPECT_EQ(count, 10) << state;
    std::set<Eigen::Index> all(split.train_rows.begin(), split.train_rows.end());
    all.insert(split.test_rows.begin(), split.test_rows.end());
    EXPECT_EQ(all.size(), 100u);
    EXPECT_TRUE(std::is_sorted(split.train_rows.begin(), split.train_rows.end()));
}

TEST(StratifiedSplit, OddCountsRoundTrainingUp) {
    const Eigen::MatrixXd x = replicated_states(3, 5);
    std::mt19937_64 rng(2);
    const TrainTestSplit split = stratified_split(x, 0.5, rng);
    EXPECT_EQ(split.train_rows.size(), 9u);  // ceil(2.5) = 3 per state
    EXPECT_EQ(split.test_rows.size(), 6u);
}

TEST(StratifiedSplit, EveryStateKeepsAHeldOutReplicate) {
    const Eigen::MatrixXd x = replicated_states(4, 2);
    std::mt19937_64 rng(3);
    const TrainTestSplit split = stratified_split(x, 0.9, rng);
    std::map<double, int> held;
    for (auto r : split.test_rows) ++held[x(r, 0)];
    EXPECT_EQ(held.size(), 4u);
    for (const auto& [state, count] : held) EXPECT_GE(count, 1);
}

TEST(StratifiedSplit, DeterministicForSeedAndValidatesFraction) {
    const Eigen::MatrixXd x = replicated_states(3, 10);
    std::mt19937_64 a(7), b(7), c(8);
    const auto sa = stratified_split(x, 0.5, a);
    const auto sb = stratified_split(x, 0.5, b);
    const auto sc = stratified_split(x, 0.5, c);
    EXPECT_EQ(sa.train_rows, sb.train_rows);
    EXPECT_NE(sa.train_rows, sc.train_rows);
    EXPECT_THROW(stratified_split(x, 1.0, a), Error);
    EXPECT_THROW(stratified_split(x, 0.0, a), Error);
}

TEST(SelectRows, CopiesRowsAndNames) {
    DiDataset ds;
    ds.inputs = replicated_states(2, 2);
    ds.targets = Eigen::VectorXd::LinSpaced(4, 0.0, 3.0);
    ds.column_names = {"damage", "load"};
    const DiDataset sub = select_rows(ds, {1, 3});
    EXPECT_EQ(sub.size(), 2);
    EXPECT_EQ(sub.targets(1), 3.0);
    EXPECT_EQ(sub.column_names, ds.column_names);
}

TEST(Config, ParsesSectionsListsAndComments) {
    std::stringstream in(R"(# pipeline config
seed = 9
[simulation]
n_replicates = 4   # fewer for speed
damage_grid = [0, 1.5, 3]
load_grid = 0, 2
[di]
kind = normalized
mode = "as-written"
policy = both
n_use = 1000
[train]
model = vhgpr
restarts = 2
center_targets = true
train_fraction = 0.25
[quantify]
grid_refine = 2
low_confidence_threshold = 0.1
[paths]
workdir = "out dir"
)");
    const PipelineConfig c = parse_config(in);
    EXPECT_EQ(c.simulation.rng_seed, 9u);
    EXPECT_EQ(c.train.seed, 9u);
    EXPECT_EQ(c.simulation.n_replicates, 4);
    EXPECT_EQ(c.damage_grid, (std::vector<double>{0.0, 1.5, 3.0}));
    EXPECT_EQ(c.load_grid, (std::vector<double>{0.0, 2.0}));
    EXPECT_EQ(c.di.settings.kind, DiKind::normalized);
    EXPECT_EQ(c.di.settings.mode, NormalizedMode::as_written);
    EXPECT_EQ(c.di.policy.kind, ReferencePolicyKind::both_classes);
    EXPECT_EQ(c.di.settings.n_use, 1000u);
    EXPECT_EQ(c.train.model_kind, ModelKind::vhgpr);
    EXPECT_EQ(c.train.restarts, 2);
    EXPECT_TRUE(c.train.center_targets);
    EXPECT_DOUBLE_EQ(c.train.train_fraction, 0.25);
    EXPECT_EQ(c.quantify.grid_refine, 2);
    EXPECT_DOUBLE_EQ(c.quantify.options.low_confidence_threshold, 0.1);
    EXPECT_EQ(c.paths.workdir, "out dir");
    EXPECT_EQ(c.train.optimizer().n_restarts, 2);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
    std::stringstream unknown("[train]\nrestart = 3\n");
    try {
        (void)parse_config(unknown, "cfg");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("cfg:2"), std::string::npos) << e.what();
        EXPECT_NE(std::string(e.what()).find("train.restart"), std::string::npos);
    }
    std::stringstream fraction("train.train_fraction = 1.0\n");
    EXPECT_THROW((void)parse_config(fraction), Error);
    std::stringstream notnum("simulation.n_replicates = many\n");
    EXPECT_THROW((void)parse_config(notnum), Error);
    std::stringstream noeq("seed 4\n");
    EXPECT_THROW((void)parse_config(noeq), Error);
}

TEST(Config, EnvironmentSeedOverridesConfig) {
    std::stringstream in("seed = 3\n");
    PipelineConfig c = parse_config(in);
    ::setenv("GWQUANT_SEED", "1234", 1);
    EXPECT_EQ(apply_seed_environment(c), std::optional<std::uint64_t>(1234));
    EXPECT_EQ(c.simulation.rng_seed, 1234u);
    EXPECT_EQ(c.train.seed, 1234u);
    ::setenv("GWQUANT_SEED", "-5", 1);
    EXPECT_THROW(apply_seed_environment(c), Error);
    ::unsetenv("GWQUANT_SEED");
    EXPECT_FALSE(apply_seed_environment(c).has_value());
}

TEST(Config, DefaultsValidate) {
    const PipelineConfig c;
    EXPECT_NO_THROW(c.validate());
    EXPECT_DOUBLE_EQ(c.train.train_fraction, 0.5);
    EXPECT_DOUBLE_EQ(c.quantify.options.low_confidence_threshold, 0.05);
}

}  // namespace
}  // namespace gwquant
