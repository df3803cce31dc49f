#pragma once

#include <Eigen/Core>

namespace gwquant {

/// Per-query mean and variance of the predictive distribution over DI values.
struct PredictiveMoments {
    Eigen::VectorXd mean;
    Eigen::VectorXd variance;
    Eigen::MatrixXd query_inputs;
};

/// Read-only view of a trained regression model. Implementations are
/// immutable after construction and safe for concurrent prediction.
class Regressor {
public:
    virtual ~Regressor() = default;

    [[nodiscard]] virtual PredictiveMoments predict(const Eigen::Ref<const Eigen::MatrixXd>& queries) const = 0;
    [[nodiscard]] virtual const Eigen::MatrixXd& train_inputs() const = 0;
    [[nodiscard]] virtual const Eigen::VectorXd& train_targets() const = 0;

    [[nodiscard]] Eigen::Index input_dim() const { return train_inputs().cols(); }
};

}  // namespace gwquant
