#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "gwquant/error.hpp"
#include "gwquant/model_io.hpp"

namespace gwquant {
namespace {

void make_data(Eigen::MatrixXd& x, Eigen::VectorXd& y) {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> nd(0.0, 0.02);
    x.resize(24, 2);
    y.resize(24);
    for (Eigen::Index i = 0; i < 24; ++i) {
        x(i, 0) = static_cast<double>(i % 4);
        x(i, 1) = static_cast<double>((i / 4) % 3);
        y(i) = 0.3 * x(i, 0) + 0.1 * x(i, 1) + nd(rng);
    }
}

template <typename Model>
void expect_same_predictions(const Model& a, const Regressor& b) {
    Eigen::MatrixXd q(3, 2);
    q << 0.5, 1.0, 2.0, 0.0, 3.5, 2.0;
    const PredictiveMoments pa = a.predict(q);
    const PredictiveMoments pb = b.predict(q);
    EXPECT_EQ(pa.mean, pb.mean);
    EXPECT_EQ(pa.variance, pb.variance);
}

TEST(ModelIo, SgprRoundTripPreservesPredictionsExactly) {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    make_data(x, y);
    OptimizerConfig config;
    config.n_restarts = 1;
    const AnyModel model = train_sgpr(x, y, config);
    std::stringstream buffer;
    save_model(buffer, model, 99);
    EXPECT_EQ(buffer.str().rfind("gwquant-model 1", 0), 0u);
    const AnyModel back = load_model(buffer);
    ASSERT_EQ(kind_of(back), ModelKind::sgpr);
    expect_same_predictions(std::get<SgprModel>(model), as_regressor(back));
    std::stringstream again;
    save_model(again, back, 99);
    EXPECT_EQ(again.str(), buffer.str());
}

TEST(ModelIo, VhgprRoundTripPreservesPredictionsExactly) {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    make_data(x, y);
    OptimizerConfig config;
    config.n_restarts = 0;
    const AnyModel model = train_vhgpr(x, y, config);
    std::stringstream buffer;
    save_model(buffer, model);
    const AnyModel back = load_model(buffer);
    ASSERT_EQ(kind_of(back), ModelKind::vhgpr);
    expect_same_predictions(std::get<VhgprModel>(model), as_regressor(back));
}

TEST(ModelIo, SchemaMismatchMentionsSchema) {
    std::stringstream wrong_version("gwquant-model 2\nkind sgpr\n");
    try {
        (void)load_model(wrong_version);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::schema);
        EXPECT_NE(std::string(e.what()).find("schema"), std::string::npos);
    }
    std::stringstream not_a_model("hello world\n");
    try {
        (void)load_model(not_a_model);
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("schema"), std::string::npos);
    }
}

TEST(ModelIo, TruncatedFileIsRejected) {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    make_data(x, y);
    OptimizerConfig config;
    config.n_restarts = 0;
    std::stringstream buffer;
    save_model(buffer, AnyModel(train_sgpr(x, y, config)));
    std::string text = buffer.str();
    text.resize(text.size() / 2);
    std::stringstream truncated(text);
    EXPECT_THROW((void)load_model(truncated), Error);
}

TEST(ModelIo, KindParsing) {
    EXPECT_EQ(parse_model_kind("sgpr"), ModelKind::sgpr);
    EXPECT_EQ(parse_model_kind("vhgpr"), ModelKind::vhgpr);
    EXPECT_EQ(to_string(ModelKind::vhgpr), "vhgpr");
    EXPECT_THROW(parse_model_kind("svm"), Error);
}

}  // namespace
}  // namespace gwquant
