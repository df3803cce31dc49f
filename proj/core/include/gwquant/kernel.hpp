#pragma once

#include <Eigen/Core>

namespace gwquant {

/// ARD squared-exponential kernel hyperparameters, stored in log-space:
///   k(a, b) = exp(log_output_variance) * exp(-1/2 sum_d (a_d - b_d)^2 / l_d^2)
/// with l_d = exp(log_length_scales[d]).
struct KernelParams {
    double log_output_variance = 0.0;
    Eigen::VectorXd log_length_scales;

    KernelParams() = default;
    KernelParams(double log_variance, Eigen::VectorXd log_lengths)
        : log_output_variance(log_variance), log_length_scales(std::move(log_lengths)) {}

    [[nodiscard]] Eigen::Index dim() const { return log_length_scales.size(); }
    [[nodiscard]] double output_variance() const;
    [[nodiscard]] Eigen::VectorXd length_scales() const;
    /// Number of free parameters: output variance plus one length scale per input.
    [[nodiscard]] Eigen::Index n_params() const { return dim() + 1; }

    [[nodiscard]] Eigen::VectorXd packed() const;
    static KernelParams unpack(const Eigen::Ref<const Eigen::VectorXd>& packed);

    void validate() const;
};

double se_kernel(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b,
                 const KernelParams& params);

Eigen::MatrixXd kernel_matrix(const Eigen::Ref<const Eigen::MatrixXd>& xa, const Eigen::Ref<const Eigen::MatrixXd>& xb,
                              const KernelParams& params);

/// For every log-parameter theta_k returns sum_ij G_ij dK_ij/dtheta_k, where
/// K = kernel_matrix(x, x). Equals tr(G dK/dtheta_k) because dK is symmetric.
Eigen::VectorXd kernel_gradient_contractions(const Eigen::Ref<const Eigen::MatrixXd>& x, const KernelParams& params,
                                             const Eigen::Ref<const Eigen::MatrixXd>& k,
                                             const Eigen::Ref<const Eigen::MatrixXd>& g);

}  // namespace gwquant
