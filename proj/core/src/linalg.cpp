#include "gwquant/linalg.hpp"

#include <cmath>
#include <string>

#include "gwquant/error.hpp"

namespace gwquant {

double JitteredCholesky::log_determinant() const {
    return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

Eigen::MatrixXd JitteredCholesky::inverse() const {
    const auto n = llt.matrixLLT().rows();
    return llt.solve(Eigen::MatrixXd::Identity(n, n));
}

JitteredCholesky robust_cholesky(const Eigen::Ref<const Eigen::MatrixXd>& a) {
    require(a.rows() == a.cols(), ErrorKind::dimension_mismatch, "robust_cholesky: matrix is not square");
    require(a.allFinite(), ErrorKind::invalid_argument, "robust_cholesky: matrix has non-finite entries");
    const Eigen::Index n = a.rows();

    JitteredCholesky out;
    out.llt.compute(a);
    if (out.llt.info() == Eigen::Success) return out;

    double scale = n > 0 ? a.diagonal().mean() : 1.0;
    if (!(scale > 0.0)) scale = 1.0;
    Eigen::MatrixXd shifted = a;
    for (double rel = 1e-10; rel <= 1e-4 * (1.0 + 1e-9); rel *= 10.0) {
        const double jitter = rel * scale;
        shifted.diagonal() = a.diagonal().array() + jitter;
        out.llt.compute(shifted);
        if (out.llt.info() == Eigen::Success) {
            out.jitter = jitter;
            return out;
        }
    }
    fail(ErrorKind::not_positive_definite,
         "matrix is not positive definite even with jitter " + std::to_string(1e-4 * scale));
}

}  // namespace gwquant
