#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "gwquant/error.hpp"
#include "gwquant/metrics.hpp"
#include "gwquant/sgpr.hpp"
#include "oracles.hpp"

namespace gwquant {
namespace {

struct Instance {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    KernelParams kernel;
    double log_noise;
};

Instance random_instance(std::mt19937_64& rng, Eigen::Index n, Eigen::Index d) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::uniform_real_distribution<double> lp(-0.7, 0.7);
    Instance inst;
    inst.x.resize(n, d);
    inst.y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) inst.x(i, j) = u(rng);
        inst.y(i) = std::sin(inst.x(i, 0)) + 0.3 * u(rng);
    }
    Eigen::VectorXd ll(d);
    for (Eigen::Index j = 0; j < d; ++j) ll(j) = lp(rng);
    inst.kernel = KernelParams(lp(rng), ll);
    inst.log_noise = -2.0 + lp(rng);
    return inst;
}

double nlml_oracle(const Instance& inst, const Eigen::VectorXd& theta) {
    const Eigen::Index d = inst.x.cols();
    const double variance = std::exp(theta(0));
    const Eigen::VectorXd lengths = theta.segment(1, d).array().exp();
    const double noise = std::exp(theta(d + 1));
    Eigen::MatrixXd c = oracle::se_kernel_naive(inst.x, inst.x, variance, lengths);
    c.diagonal().array() += noise;
    return -oracle::log_normal_density(inst.y, c);
}

TEST(SgprNlml, ValueMatchesDenseOracle) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const Instance inst = random_instance(rng, 3 + trial % 10, 1 + trial % 3);
        const NlmlResult r = sgpr_nlml(inst.kernel, inst.log_noise, inst.x, inst.y);
        const double expected = nlml_oracle(inst, pack_sgpr_params(inst.kernel, inst.log_noise));
        EXPECT_NEAR(r.value, expected, 1e-9 * std::max(1.0, std::abs(expected)));
    }
}

TEST(SgprNlml, GradientMatchesFiniteDifferences) {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const Instance inst = random_instance(rng, 4 + trial % 16, 1 + trial % 3);
        const NlmlResult r = sgpr_nlml(inst.kernel, inst.log_noise, inst.x, inst.y);
        const auto f = [&](const Eigen::VectorXd& theta) { return nlml_oracle(inst, theta); };
        const Eigen::VectorXd numeric =
            oracle::central_difference(f, pack_sgpr_params(inst.kernel, inst.log_noise), 1e-5);
        EXPECT_LT(oracle::relative_error(r.gradient, numeric), 1e-5) << "trial " << trial;
    }
}

TEST(SgprPredict, MatchesDenseInverseEvaluation) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        const Instance inst = random_instance(rng, 2 + trial % 7, 1 + trial % 3);
        const double offset = 0.25 * trial;
        const SgprModel model(inst.kernel, inst.log_noise, inst.x, inst.y, offset);
        Eigen::MatrixXd q(5, inst.x.cols());
        for (Eigen::Index i = 0; i < q.rows(); ++i)
            for (Eigen::Index j = 0; j < q.cols(); ++j) q(i, j) = u(rng);
        const PredictiveMoments m = sgpr_predict(model, q);

        const double s2 = inst.kernel.output_variance();
        const Eigen::VectorXd ls = inst.kernel.length_scales();
        Eigen::MatrixXd c = oracle::se_kernel_naive(inst.x, inst.x, s2, ls);
        c.diagonal().array() += std::exp(inst.log_noise);
        const Eigen::MatrixXd inv = c.inverse();
        const Eigen::MatrixXd ks = oracle::se_kernel_naive(inst.x, q, s2, ls);
        const Eigen::VectorXd centered = inst.y.array() - offset;
        const Eigen::VectorXd mean = (ks.transpose() * inv * centered).array() + offset;
        const Eigen::VectorXd var =
            (s2 - (ks.transpose() * inv * ks).diagonal().array()).array() + std::exp(inst.log_noise);
        EXPECT_LT(oracle::relative_error(m.mean, mean), 1e-9);
        EXPECT_LT(oracle::relative_error(m.variance, var), 1e-9);
    }
}

TEST(SgprModel, StoresNlmlAndRejectsBadShapes) {
    std::mt19937_64 rng(14);
    const Instance inst = random_instance(rng, 6, 2);
    const SgprModel model(inst.kernel, inst.log_noise, inst.x, inst.y);
    EXPECT_NEAR(model.nlml(), sgpr_nlml(inst.kernel, inst.log_noise, inst.x, inst.y).value, 1e-12);
    EXPECT_THROW((void)model.predict(Eigen::MatrixXd::Zero(1, 3)), Error);
    EXPECT_THROW(SgprModel(inst.kernel, inst.log_noise, inst.x, Eigen::VectorXd::Zero(5)), Error);
}

Eigen::MatrixXd column(std::initializer_list<double> values) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(values.size()), 1);
    Eigen::Index i = 0;
    for (double v : values) x(i++, 0) = v;
    return x;
}

TEST(TrainSgpr, ImprovesOnInitialPointAndIsDeterministic) {
    std::mt19937_64 rng(15);
    std::normal_distribution<double> nd(0.0, 0.05);
    Eigen::MatrixXd x(40, 1);
    Eigen::VectorXd y(40);
    for (Eigen::Index i = 0; i < 40; ++i) {
        x(i, 0) = static_cast<double>(i % 8);
        y(i) = 0.5 * x(i, 0) + nd(rng);
    }
    OptimizerConfig config;
    config.seed = 3;
    SgprTrainingReport report;
    const SgprModel a = train_sgpr(x, y, config, &report);
    const SgprModel b = train_sgpr(x, y, config);
    ASSERT_EQ(report.final_values.size(), 6u);
    for (std::size_t i = 0; i < report.final_values.size(); ++i) {
        EXPECT_LE(report.final_values[i], report.initial_values[i]);
        EXPECT_GE(report.final_values[i], report.final_values[report.best_restart]);
    }
    EXPECT_EQ(a.kernel().packed(), b.kernel().packed());
    EXPECT_EQ(a.log_noise_variance(), b.log_noise_variance());
    EXPECT_NEAR(a.noise_variance(), 0.05 * 0.05, 0.5 * 0.05 * 0.05);
    const PredictiveMoments m = a.predict(column({0.0, 3.0, 7.0}));
    EXPECT_NEAR(m.mean(1), 1.5, 0.05);
}

TEST(TrainSgpr, ConstantTargetsWarn) {
    const Eigen::MatrixXd x = column({0, 1, 2, 3});
    const Eigen::VectorXd y = Eigen::VectorXd::Constant(4, 2.0);
    const SgprModel m = train_sgpr(x, y, OptimizerConfig{});
    ASSERT_FALSE(m.warnings().empty());
    EXPECT_NE(m.warnings()[0].find("constant"), std::string::npos);
}

TEST(TrainSgpr, CenteringRevertsToTrainingMean) {
    const Eigen::MatrixXd x = column({0, 0, 1, 1, 2, 2});
    Eigen::VectorXd y(6);
    y << 10.0, 10.1, 11.0, 11.1, 12.0, 12.1;
    OptimizerConfig config;
    config.center_targets = true;
    const SgprModel m = train_sgpr(x, y, config);
    EXPECT_NEAR(m.target_offset(), y.mean(), 1e-12);
    EXPECT_NEAR(m.predict(column({100.0})).mean(0), y.mean(), 1e-6);
}

TEST(Metrics, NmseAndRssSssMatchDefinitions) {
    Eigen::VectorXd truth(4), pred(4), train(3);
    truth << 1.0, 2.0, 3.0, 4.0;
    pred << 1.5, 2.0, 2.0, 4.0;
    train << 0.0, 2.0, 4.0;
    const FitMetrics m = evaluate_fit(pred, truth, train);
    // sum sq error 1.25; truth deviations from the training mean 2: 1+0+1+4 = 6
    EXPECT_NEAR(m.nmse, 1.25 / 6.0, 1e-15);
    EXPECT_NEAR(m.rss_sss_percent, 100.0 * 1.25 / 30.0, 1e-12);
    const Eigen::VectorXd flat = Eigen::VectorXd::Constant(3, 2.0);
    const Eigen::VectorXd flat_truth = Eigen::VectorXd::Constant(3, 2.0);
    EXPECT_THROW(evaluate_fit(flat, flat_truth, flat), Error);
}

}  // namespace
}  // namespace gwquant
