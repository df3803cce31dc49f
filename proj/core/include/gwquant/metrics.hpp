#pragma once

#include <Eigen/Core>

#include "gwquant/regressor.hpp"

namespace gwquant {

struct FitMetrics {
    /// mean((y - yhat)^2) / mean((y - mean(y_train))^2)
    double nmse = 0.0;
    /// 100 * sum((y - yhat)^2) / sum(y^2)
    double rss_sss_percent = 0.0;
};

FitMetrics evaluate_fit(const PredictiveMoments& moments, const Eigen::Ref<const Eigen::VectorXd>& y_true,
                        const Eigen::Ref<const Eigen::VectorXd>& y_train);

FitMetrics evaluate_fit(const Eigen::Ref<const Eigen::VectorXd>& predicted_mean,
                        const Eigen::Ref<const Eigen::VectorXd>& y_true, const Eigen::Ref<const Eigen::VectorXd>& y_train);

}  // namespace gwquant
