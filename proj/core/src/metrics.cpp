#include "gwquant/metrics.hpp"

#include "gwquant/error.hpp"

namespace gwquant {

FitMetrics evaluate_fit(const Eigen::Ref<const Eigen::VectorXd>& predicted_mean,
                        const Eigen::Ref<const Eigen::VectorXd>& y_true, const Eigen::Ref<const Eigen::VectorXd>& y_train) {
    require(predicted_mean.size() == y_true.size(), ErrorKind::dimension_mismatch,
            "evaluate_fit: prediction and truth lengths differ");
    require(y_true.size() >= 1 && y_train.size() >= 1, ErrorKind::invalid_argument, "evaluate_fit: empty input");

    const double sse = (y_true - predicted_mean).squaredNorm();
    const double baseline = (y_true.array() - y_train.mean()).square().sum();
    const double sss = y_true.squaredNorm();
    require(baseline > 0.0, ErrorKind::degenerate_denominator,
            "evaluate_fit: targets equal the training mean everywhere (NMSE undefined)");
    require(sss > 0.0, ErrorKind::degenerate_denominator, "evaluate_fit: targets are all zero (RSS/SSS undefined)");

    return FitMetrics{sse / baseline, 100.0 * sse / sss};
}

FitMetrics evaluate_fit(const PredictiveMoments& moments, const Eigen::Ref<const Eigen::VectorXd>& y_true,
                        const Eigen::Ref<const Eigen::VectorXd>& y_train) {
    return evaluate_fit(moments.mean, y_true, y_train);
}

}  // namespace gwquant
