#include "gwquant/sgpr.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "gwquant/error.hpp"

namespace gwquant {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

void check_training_data(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y) {
    require(x.rows() == y.size(), ErrorKind::dimension_mismatch, "inputs and targets have different row counts");
    require(x.rows() >= 1 && x.cols() >= 1, ErrorKind::invalid_argument, "training data is empty");
    require(x.allFinite() && y.allFinite(), ErrorKind::invalid_argument, "training data has non-finite entries");
}

Eigen::MatrixXd noisy_covariance(const Eigen::Ref<const Eigen::MatrixXd>& x, const KernelParams& params,
                                 double noise_variance) {
    Eigen::MatrixXd k = kernel_matrix(x, x, params);
    k.diagonal().array() += noise_variance;
    return k;
}

}  // namespace

Eigen::VectorXd pack_sgpr_params(const KernelParams& params, double log_noise_variance) {
    Eigen::VectorXd out(params.n_params() + 1);
    out.head(params.n_params()) = params.packed();
    out(params.n_params()) = log_noise_variance;
    return out;
}

NlmlResult sgpr_nlml(const KernelParams& params, double log_noise_variance, const Eigen::Ref<const Eigen::MatrixXd>& x,
                     const Eigen::Ref<const Eigen::VectorXd>& y) {
    check_training_data(x, y);
    params.validate();
    require(x.cols() == params.dim(), ErrorKind::dimension_mismatch, "sgpr_nlml: kernel dimension mismatch");
    require(std::isfinite(log_noise_variance), ErrorKind::invalid_argument, "log noise variance must be finite");

    const auto n = static_cast<double>(x.rows());
    const double noise = std::exp(log_noise_variance);
    const Eigen::MatrixXd k = kernel_matrix(x, x, params);
    Eigen::MatrixXd ky = k;
    ky.diagonal().array() += noise;
    const JitteredCholesky chol = robust_cholesky(ky);
    const Eigen::VectorXd alpha = chol.llt.solve(y);

    NlmlResult out;
    out.value = 0.5 * y.dot(alpha) + 0.5 * chol.log_determinant() + 0.5 * n * kLog2Pi;

    Eigen::MatrixXd w = alpha * alpha.transpose() - chol.inverse();
    out.gradient.resize(params.n_params() + 1);
    out.gradient.head(params.n_params()) = -0.5 * kernel_gradient_contractions(x, params, k, w);
    out.gradient(params.n_params()) = -0.5 * noise * w.trace();
    return out;
}

SgprModel::SgprModel(KernelParams kernel, double log_noise_variance, Eigen::MatrixXd x, Eigen::VectorXd y,
                     double target_offset)
    : kernel_(std::move(kernel)),
      log_noise_variance_(log_noise_variance),
      x_(std::move(x)),
      y_(std::move(y)),
      target_offset_(target_offset) {
    check_training_data(x_, y_);
    kernel_.validate();
    require(x_.cols() == kernel_.dim(), ErrorKind::dimension_mismatch, "SgprModel: kernel dimension mismatch");
    require(std::isfinite(log_noise_variance_) && std::isfinite(target_offset_), ErrorKind::invalid_argument,
            "SgprModel: non-finite noise variance or offset");
    chol_ = robust_cholesky(noisy_covariance(x_, kernel_, noise_variance()));
    const Eigen::VectorXd centered = y_.array() - target_offset_;
    alpha_ = chol_.llt.solve(centered);
    nlml_ = 0.5 * centered.dot(alpha_) + 0.5 * chol_.log_determinant() +
            0.5 * static_cast<double>(x_.rows()) * kLog2Pi;
}

double SgprModel::noise_variance() const { return std::exp(log_noise_variance_); }

PredictiveMoments SgprModel::predict(const Eigen::Ref<const Eigen::MatrixXd>& queries) const {
    require(queries.cols() == x_.cols(), ErrorKind::dimension_mismatch,
            "sgpr_predict: query has " + std::to_string(queries.cols()) + " columns, model expects " +
                std::to_string(x_.cols()));
    const Eigen::MatrixXd k_cross = kernel_matrix(x_, queries, kernel_);  // n x m
    PredictiveMoments out;
    out.query_inputs = queries;
    out.mean = (k_cross.transpose() * alpha_).array() + target_offset_;
    const Eigen::MatrixXd v = chol_.llt.matrixL().solve(k_cross);
    const double prior = kernel_.output_variance();
    out.variance = (prior - v.colwise().squaredNorm().transpose().array()).max(0.0) + noise_variance();
    return out;
}

PredictiveMoments sgpr_predict(const SgprModel& model, const Eigen::Ref<const Eigen::MatrixXd>& queries) {
    return model.predict(queries);
}

Eigen::VectorXd sgpr_initial_point(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                                   std::vector<std::string>* warnings) {
    const Eigen::Index d = x.cols();
    Eigen::VectorXd theta(d + 2);
    double variance = (y.array() - y.mean()).square().mean();
    if (!(variance > 1e-300)) {
        if (warnings) warnings->emplace_back("targets are constant; hyperparameters are poorly determined");
        const double ms = y.squaredNorm() / static_cast<double>(y.size());
        variance = ms > 1e-300 ? ms : 1.0;
    }
    theta(0) = std::log(variance);
    for (Eigen::Index j = 0; j < d; ++j) {
        const double range = x.col(j).maxCoeff() - x.col(j).minCoeff();
        theta(j + 1) = std::log(range > 0.0 ? range : 1.0);
    }
    theta(d + 1) = std::log(0.1 * variance);
    return theta;
}

SgprModel train_sgpr(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                     const OptimizerConfig& config, SgprTrainingReport* report) {
    check_training_data(x, y);
    require(x.rows() >= 2, ErrorKind::invalid_argument, "train_sgpr needs at least 2 training points");
    require(config.n_restarts >= 0, ErrorKind::invalid_argument, "n_restarts must be >= 0");

    const double offset = config.center_targets ? y.mean() : 0.0;
    const Eigen::VectorXd target = y.array() - offset;
    const Eigen::Index d = x.cols();

    std::vector<std::string> warnings;
    const Eigen::VectorXd base = sgpr_initial_point(x, target, &warnings);

    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> jitter(0.0, config.restart_log_std);
    std::vector<Eigen::VectorXd> starts{base};
    for (int r = 0; r < config.n_restarts; ++r) {
        Eigen::VectorXd p = base;
        for (Eigen::Index i = 0; i < p.size(); ++i) p(i) += jitter(rng);
        starts.push_back(std::move(p));
    }

    const Objective objective = [&](const Eigen::VectorXd& theta, Eigen::VectorXd& gradient) {
        const NlmlResult r = sgpr_nlml(KernelParams::unpack(theta.head(d + 1)), theta(d + 1), x, target);
        gradient = r.gradient;
        return r.value;
    };

    SgprTrainingReport local;
    SgprTrainingReport& rep = report ? *report : local;
    rep = {};
    double best_value = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_theta;
    for (std::size_t i = 0; i < starts.size(); ++i) {
        Eigen::VectorXd g;
        double initial = std::numeric_limits<double>::infinity();
        try {
            initial = objective(starts[i], g);
        } catch (const Error&) {
        }
        const MinimizeResult result = minimize_lbfgs(objective, starts[i], config.lbfgs);
        rep.initial_points.push_back(starts[i]);
        rep.initial_values.push_back(initial);
        rep.final_values.push_back(result.value);
        if (std::isfinite(result.value) && result.value < best_value) {
            best_value = result.value;
            best_theta = result.x;
            rep.best_restart = i;
        }
    }
    if (!std::isfinite(best_value)) {
        fail(ErrorKind::optimizer_failure, "train_sgpr: no restart produced a finite negative log marginal likelihood");
    }

    SgprModel model(KernelParams::unpack(best_theta.head(d + 1)), best_theta(d + 1), x, y, offset);
    for (auto& w : warnings) model.add_warning(std::move(w));
    return model;
}

}  // namespace gwquant
