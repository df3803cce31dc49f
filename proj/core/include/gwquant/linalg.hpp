#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace gwquant {

/// Cholesky factorization of A + jitter * I.
struct JitteredCholesky {
    Eigen::LLT<Eigen::MatrixXd> llt;
    double jitter = 0.0;

    [[nodiscard]] Eigen::MatrixXd factor() const { return llt.matrixL(); }
    [[nodiscard]] double log_determinant() const;
    [[nodiscard]] Eigen::MatrixXd inverse() const;
};

/// Tries jitter 0, then 1e-10 * mean(diag A) growing x10 up to
/// 1e-4 * mean(diag A). Throws not-positive-definite when every level fails.
JitteredCholesky robust_cholesky(const Eigen::Ref<const Eigen::MatrixXd>& a);

}  // namespace gwquant
