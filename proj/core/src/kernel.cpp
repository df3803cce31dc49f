#include "gwquant/kernel.hpp"

#include <cmath>

#include "gwquant/error.hpp"

namespace gwquant {

double KernelParams::output_variance() const { return std::exp(log_output_variance); }

Eigen::VectorXd KernelParams::length_scales() const { return log_length_scales.array().exp(); }

Eigen::VectorXd KernelParams::packed() const {
    Eigen::VectorXd out(n_params());
    out(0) = log_output_variance;
    out.tail(dim()) = log_length_scales;
    return out;
}

KernelParams KernelParams::unpack(const Eigen::Ref<const Eigen::VectorXd>& packed) {
    require(packed.size() >= 2, ErrorKind::invalid_argument, "kernel parameter vector too short");
    return KernelParams(packed(0), packed.tail(packed.size() - 1));
}

void KernelParams::validate() const {
    require(dim() >= 1, ErrorKind::invalid_argument, "kernel needs at least one length scale");
    require(std::isfinite(log_output_variance) && log_length_scales.allFinite(), ErrorKind::invalid_argument,
            "kernel parameters must be finite");
}

double se_kernel(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b,
                 const KernelParams& params) {
    require(a.size() == params.dim() && b.size() == params.dim(), ErrorKind::dimension_mismatch,
            "se_kernel: input dimension does not match kernel dimension");
    const Eigen::ArrayXd scaled = (a - b).array() * (-params.log_length_scales.array()).exp();
    return params.output_variance() * std::exp(-0.5 * scaled.square().sum());
}

Eigen::MatrixXd kernel_matrix(const Eigen::Ref<const Eigen::MatrixXd>& xa, const Eigen::Ref<const Eigen::MatrixXd>& xb,
                              const KernelParams& params) {
    require(xa.cols() == params.dim() && xb.cols() == params.dim(), ErrorKind::dimension_mismatch,
            "kernel_matrix: column count does not match kernel dimension");
    const Eigen::RowVectorXd inv_length = (-params.log_length_scales.array()).exp().matrix().transpose();
    const Eigen::MatrixXd sa = xa.array().rowwise() * inv_length.array();
    const Eigen::MatrixXd sb = xb.array().rowwise() * inv_length.array();
    const double variance = params.output_variance();
    Eigen::MatrixXd k(xa.rows(), xb.rows());
    for (Eigen::Index j = 0; j < sb.rows(); ++j) {
        for (Eigen::Index i = 0; i < sa.rows(); ++i) {
            k(i, j) = variance * std::exp(-0.5 * (sa.row(i) - sb.row(j)).squaredNorm());
        }
    }
    return k;
}

Eigen::VectorXd kernel_gradient_contractions(const Eigen::Ref<const Eigen::MatrixXd>& x, const KernelParams& params,
                                             const Eigen::Ref<const Eigen::MatrixXd>& k,
                                             const Eigen::Ref<const Eigen::MatrixXd>& g) {
    const Eigen::Index n = x.rows();
    require(k.rows() == n && k.cols() == n && g.rows() == n && g.cols() == n, ErrorKind::dimension_mismatch,
            "kernel_gradient_contractions: matrix sizes disagree");
    const Eigen::MatrixXd gk = g.cwiseProduct(k);
    Eigen::VectorXd out(params.n_params());
    out(0) = gk.sum();
    for (Eigen::Index d = 0; d < params.dim(); ++d) {
        const double inv_l2 = std::exp(-2.0 * params.log_length_scales(d));
        double acc = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            const double xj = x(j, d);
            for (Eigen::Index i = 0; i < n; ++i) {
                const double diff = x(i, d) - xj;
                acc += gk(i, j) * diff * diff;
            }
        }
        out(d + 1) = acc * inv_l2;
    }
    return out;
}

}  // namespace gwquant
