#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "gwquant/kernel.hpp"
#include "gwquant/linalg.hpp"
#include "gwquant/optimizer.hpp"
#include "gwquant/regressor.hpp"

namespace gwquant {

struct NlmlResult {
    double value = 0.0;
    /// d/d[log s0^2, log l_1..l_D, log sn^2]
    Eigen::VectorXd gradient;
};

/// Negative log marginal likelihood of a zero-mean GP with ARD-SE kernel and
/// Gaussian noise, with its analytic gradient in log-parameter space.
NlmlResult sgpr_nlml(const KernelParams& params, double log_noise_variance,
                     const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y);

/// Packed form [kernel.packed(), log_noise_variance].
Eigen::VectorXd pack_sgpr_params(const KernelParams& params, double log_noise_variance);

/// Homoscedastic GP regression model with cached factorization.
class SgprModel final : public Regressor {
public:
    /// Builds the cached Cholesky factor and weights for fixed hyperparameters.
    /// `target_offset` is subtracted from the targets before fitting and added
    /// back to predicted means.
    SgprModel(KernelParams kernel, double log_noise_variance, Eigen::MatrixXd x, Eigen::VectorXd y,
              double target_offset = 0.0);

    [[nodiscard]] PredictiveMoments predict(const Eigen::Ref<const Eigen::MatrixXd>& queries) const override;
    [[nodiscard]] const Eigen::MatrixXd& train_inputs() const override { return x_; }
    [[nodiscard]] const Eigen::VectorXd& train_targets() const override { return y_; }

    [[nodiscard]] const KernelParams& kernel() const { return kernel_; }
    [[nodiscard]] double log_noise_variance() const { return log_noise_variance_; }
    [[nodiscard]] double noise_variance() const;
    [[nodiscard]] double target_offset() const { return target_offset_; }
    [[nodiscard]] double jitter() const { return chol_.jitter; }
    [[nodiscard]] Eigen::MatrixXd chol_factor() const { return chol_.factor(); }
    [[nodiscard]] const Eigen::VectorXd& alpha() const { return alpha_; }
    /// Negative log marginal likelihood at the stored hyperparameters.
    [[nodiscard]] double nlml() const { return nlml_; }

    [[nodiscard]] const std::vector<std::string>& warnings() const { return warnings_; }
    void add_warning(std::string message) { warnings_.push_back(std::move(message)); }

private:
    KernelParams kernel_;
    double log_noise_variance_;
    Eigen::MatrixXd x_;
    Eigen::VectorXd y_;
    double target_offset_;
    JitteredCholesky chol_;
    Eigen::VectorXd alpha_;
    double nlml_ = 0.0;
    std::vector<std::string> warnings_;
};

struct SgprTrainingReport {
    std::vector<Eigen::VectorXd> initial_points;
    std::vector<double> initial_values;
    std::vector<double> final_values;
    std::size_t best_restart = 0;
};

/// Type-II maximum likelihood: minimizes the NLML from the data-driven
/// initialization plus `n_restarts` log-normal perturbations of it and keeps
/// the lowest result (ties to the lowest restart index).
SgprModel train_sgpr(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                     const OptimizerConfig& config, SgprTrainingReport* report = nullptr);

PredictiveMoments sgpr_predict(const SgprModel& model, const Eigen::Ref<const Eigen::MatrixXd>& queries);

/// Data-driven starting point: log var(y), log range of each column, log(0.1 var(y)).
Eigen::VectorXd sgpr_initial_point(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                                   std::vector<std::string>* warnings = nullptr);

}  // namespace gwquant
