#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "gwquant/kernel.hpp"
#include "gwquant/linalg.hpp"
#include "gwquant/optimizer.hpp"
#include "gwquant/regressor.hpp"
#include "gwquant/sgpr.hpp"

namespace gwquant {

/// Free parameters of the variational heteroscedastic model. The noise
/// variance is r(x) = exp(g(x)) with g ~ GP(mu0, k_g); the variational
/// posterior over g is parameterized by a diagonal, non-negative
/// `variational_lambda` via
///   mu    = K_g (Lambda - I/2) 1 + mu0 1
///   Sigma = (K_g^-1 + Lambda)^-1
struct VhgprParams {
    KernelParams kernel_f;
    KernelParams kernel_g;
    double mu0 = 0.0;
    Eigen::VectorXd variational_lambda;

    void validate() const;
};

/// Packed optimizer vector [kernel_f, kernel_g, mu0, rho] with
/// lambda = softplus(rho).
Eigen::VectorXd pack_vhgpr_params(const VhgprParams& params);
VhgprParams unpack_vhgpr_params(const Eigen::Ref<const Eigen::VectorXd>& packed, Eigen::Index dim, Eigen::Index n);

double softplus(double x);
double inverse_softplus(double y);

/// Individual pieces of the marginal variational bound
///   M = log N(y | 0, K_f + R) - tr(Sigma)/4 - KL(N(mu, Sigma) || N(mu0 1, K_g)).
struct MvBoundTerms {
    double log_likelihood = 0.0;
    double trace_term = 0.0;  // tr(Sigma) / 4
    double kl = 0.0;
    Eigen::VectorXd mu;
    Eigen::VectorXd sigma_diag;
    Eigen::VectorXd r_diag;

    [[nodiscard]] double bound() const { return log_likelihood - trace_term - kl; }
};

MvBoundTerms mv_bound_terms(const VhgprParams& params, const Eigen::Ref<const Eigen::MatrixXd>& x,
                            const Eigen::Ref<const Eigen::VectorXd>& y);

struct MvBoundResult {
    double value = 0.0;  // -M
    Eigen::VectorXd gradient;  // d(-M)/d packed parameters
};

/// Negated bound and its analytic gradient with respect to the packed vector.
MvBoundResult mv_bound(const VhgprParams& params, const Eigen::Ref<const Eigen::MatrixXd>& x,
                       const Eigen::Ref<const Eigen::VectorXd>& y);

/// Intermediate predictive quantities at each query.
struct VhgprLatentMoments {
    Eigen::VectorXd f_mean;      // a*
    Eigen::VectorXd f_variance;  // c*^2
    Eigen::VectorXd g_mean;      // mu*
    Eigen::VectorXd g_variance;  // sigma*^2
};

/// KL(N(mean_q, cov_q) || N(mean_p, cov_p)) for dense covariances.
double gaussian_kl(const Eigen::Ref<const Eigen::VectorXd>& mean_q, const Eigen::Ref<const Eigen::MatrixXd>& cov_q,
                   const Eigen::Ref<const Eigen::VectorXd>& mean_p, const Eigen::Ref<const Eigen::MatrixXd>& cov_p);

/// c^2 + exp(mu + s^2 / 2): predictive variance of y* given the latent moments.
double vhgpr_predictive_variance(double f_variance, double g_mean, double g_variance);

class VhgprModel final : public Regressor {
public:
    VhgprModel(VhgprParams params, Eigen::MatrixXd x, Eigen::VectorXd y, double target_offset = 0.0);

    [[nodiscard]] PredictiveMoments predict(const Eigen::Ref<const Eigen::MatrixXd>& queries) const override;
    [[nodiscard]] const Eigen::MatrixXd& train_inputs() const override { return x_; }
    [[nodiscard]] const Eigen::VectorXd& train_targets() const override { return y_; }

    [[nodiscard]] VhgprLatentMoments latent_moments(const Eigen::Ref<const Eigen::MatrixXd>& queries) const;
    /// exp(mu* + sigma*^2 / 2), the expected noise variance at each query.
    [[nodiscard]] Eigen::VectorXd noise_variance(const Eigen::Ref<const Eigen::MatrixXd>& queries) const;

    [[nodiscard]] const VhgprParams& params() const { return params_; }
    [[nodiscard]] double target_offset() const { return target_offset_; }
    [[nodiscard]] const Eigen::VectorXd& posterior_mu() const { return mu_; }
    [[nodiscard]] const Eigen::VectorXd& posterior_sigma_diag() const { return sigma_diag_; }
    [[nodiscard]] const Eigen::VectorXd& r_diag() const { return r_; }
    /// The bound M at the stored parameters.
    [[nodiscard]] double bound() const { return bound_; }

    [[nodiscard]] const std::vector<std::string>& warnings() const { return warnings_; }
    void add_warning(std::string message) { warnings_.push_back(std::move(message)); }

private:
    VhgprParams params_;
    Eigen::MatrixXd x_;
    Eigen::VectorXd y_;
    double target_offset_;
    Eigen::VectorXd sqrt_lambda_;
    Eigen::VectorXd v_;  // lambda - 1/2
    Eigen::VectorXd mu_;
    Eigen::VectorXd sigma_diag_;
    Eigen::VectorXd r_;
    JitteredCholesky chol_a_;  // K_f + R
    JitteredCholesky chol_b_;  // I + Lambda^1/2 K_g Lambda^1/2
    Eigen::VectorXd beta_;     // (K_f + R)^-1 (y - offset)
    double bound_ = 0.0;
    std::vector<std::string> warnings_;
};

struct VhgprTrainingReport {
    SgprTrainingReport sgpr;
    std::vector<double> initial_bounds;
    std::vector<double> final_bounds;
    std::vector<std::vector<double>> traces;  // -M per accepted iterate
    std::size_t best_restart = 0;
};

/// Warm start from a trained standard model, then joint quasi-Newton
/// maximization of the bound over hyperparameters and variational_lambda.
VhgprModel train_vhgpr(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                       const OptimizerConfig& config, VhgprTrainingReport* report = nullptr);

/// Initial parameters derived from a trained standard model.
VhgprParams vhgpr_initial_params(const SgprModel& sgpr);

PredictiveMoments vhgpr_predict(const VhgprModel& model, const Eigen::Ref<const Eigen::MatrixXd>& queries);

}  // namespace gwquant
