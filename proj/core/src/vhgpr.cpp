#include "gwquant/vhgpr.hpp"

#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Cholesky>

#include "gwquant/error.hpp"

namespace gwquant {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kMinRho = -40.0;

// Quantities shared by the bound, its gradient and the cached model.
struct BoundWork {
    Eigen::MatrixXd kf;
    Eigen::MatrixXd kg;
    Eigen::VectorXd sqrt_lambda;
    Eigen::VectorXd v;  // lambda - 1/2
    Eigen::MatrixXd b_inverse;
    Eigen::MatrixXd sigma;
    Eigen::VectorXd mu;
    Eigen::VectorXd r;
    JitteredCholesky chol_a;
    JitteredCholesky chol_b;
    Eigen::VectorXd beta;
    double log_likelihood = 0.0;
    double trace_term = 0.0;
    double kl = 0.0;
};

void check_data(const VhgprParams& params, const Eigen::Ref<const Eigen::MatrixXd>& x,
                const Eigen::Ref<const Eigen::VectorXd>& y) {
    params.validate();
    require(x.rows() == y.size(), ErrorKind::dimension_mismatch, "inputs and targets have different row counts");
    require(x.rows() >= 2, ErrorKind::invalid_argument, "the variational bound needs at least 2 training points");
    require(x.cols() == params.kernel_f.dim(), ErrorKind::dimension_mismatch, "kernel dimension does not match inputs");
    require(params.variational_lambda.size() == x.rows(), ErrorKind::dimension_mismatch,
            "variational_lambda must have one entry per training point");
    require(x.allFinite() && y.allFinite(), ErrorKind::invalid_argument, "training data has non-finite entries");
}

BoundWork compute_bound(const VhgprParams& params, const Eigen::Ref<const Eigen::MatrixXd>& x,
                        const Eigen::Ref<const Eigen::VectorXd>& y) {
    check_data(params, x, y);
    const Eigen::Index n = x.rows();
    BoundWork w;
    w.kf = kernel_matrix(x, x, params.kernel_f);
    w.kg = kernel_matrix(x, x, params.kernel_g);
    const Eigen::VectorXd& lambda = params.variational_lambda;
    w.sqrt_lambda = lambda.array().sqrt();
    w.v = lambda.array() - 0.5;

    Eigen::MatrixXd b = w.sqrt_lambda.asDiagonal() * w.kg * w.sqrt_lambda.asDiagonal();
    b.diagonal().array() += 1.0;
    w.chol_b = robust_cholesky(b);
    w.b_inverse = w.chol_b.inverse();

    const Eigen::MatrixXd q = w.sqrt_lambda.asDiagonal() * w.kg;
    w.sigma = w.kg - q.transpose() * w.b_inverse * q;
    w.mu = (w.kg * w.v).array() + params.mu0;
    w.r = (w.mu - 0.5 * w.sigma.diagonal()).array().exp();
    require(w.r.allFinite() && (w.r.array() > 0.0).all(), ErrorKind::not_positive_definite,
            "noise variances overflowed or underflowed");

    Eigen::MatrixXd a = w.kf;
    a.diagonal() += w.r;
    w.chol_a = robust_cholesky(a);
    w.beta = w.chol_a.llt.solve(y);

    w.log_likelihood = -0.5 * y.dot(w.beta) - 0.5 * w.chol_a.log_determinant() - 0.5 * static_cast<double>(n) * kLog2Pi;
    w.trace_term = 0.25 * w.sigma.diagonal().sum();
    w.kl = 0.5 * (w.b_inverse.trace() + w.v.dot(w.kg * w.v) - static_cast<double>(n) + w.chol_b.log_determinant());
    return w;
}

}  // namespace

void VhgprParams::validate() const {
    kernel_f.validate();
    kernel_g.validate();
    require(kernel_f.dim() == kernel_g.dim(), ErrorKind::dimension_mismatch, "kernel_f and kernel_g dimensions differ");
    require(std::isfinite(mu0), ErrorKind::invalid_argument, "mu0 must be finite");
    require(variational_lambda.allFinite() && (variational_lambda.array() >= 0.0).all(), ErrorKind::invalid_argument,
            "variational_lambda entries must be finite and non-negative");
}

double softplus(double x) { return x > 30.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double inverse_softplus(double y) {
    if (!(y > 0.0)) return kMinRho;
    if (y > 30.0) return y + std::log(-std::expm1(-y));
    return std::max(kMinRho, std::log(std::expm1(y)));
}

Eigen::VectorXd pack_vhgpr_params(const VhgprParams& params) {
    const Eigen::Index kp = params.kernel_f.n_params();
    const Eigen::Index n = params.variational_lambda.size();
    Eigen::VectorXd out(2 * kp + 1 + n);
    out.head(kp) = params.kernel_f.packed();
    out.segment(kp, kp) = params.kernel_g.packed();
    out(2 * kp) = params.mu0;
    for (Eigen::Index i = 0; i < n; ++i) out(2 * kp + 1 + i) = inverse_softplus(params.variational_lambda(i));
    return out;
}

VhgprParams unpack_vhgpr_params(const Eigen::Ref<const Eigen::VectorXd>& packed, Eigen::Index dim, Eigen::Index n) {
    const Eigen::Index kp = dim + 1;
    require(packed.size() == 2 * kp + 1 + n, ErrorKind::dimension_mismatch, "packed VHGPR vector has wrong length");
    VhgprParams p;
    p.kernel_f = KernelParams::unpack(packed.head(kp));
    p.kernel_g = KernelParams::unpack(packed.segment(kp, kp));
    p.mu0 = packed(2 * kp);
    p.variational_lambda.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) p.variational_lambda(i) = softplus(packed(2 * kp + 1 + i));
    return p;
}

MvBoundTerms mv_bound_terms(const VhgprParams& params, const Eigen::Ref<const Eigen::MatrixXd>& x,
                            const Eigen::Ref<const Eigen::VectorXd>& y) {
    BoundWork w = compute_bound(params, x, y);
    MvBoundTerms t;
    t.log_likelihood = w.log_likelihood;
    t.trace_term = w.trace_term;
    t.kl = w.kl;
    t.mu = std::move(w.mu);
    t.sigma_diag = w.sigma.diagonal();
    t.r_diag = std::move(w.r);
    return t;
}

MvBoundResult mv_bound(const VhgprParams& params, const Eigen::Ref<const Eigen::MatrixXd>& x,
                       const Eigen::Ref<const Eigen::VectorXd>& y) {
    const BoundWork w = compute_bound(params, x, y);
    const Eigen::Index n = x.rows();
    const Eigen::Index kp = params.kernel_f.n_params();
    const Eigen::VectorXd& lambda = params.variational_lambda;

    const Eigen::MatrixXd a_inverse = w.chol_a.inverse();
    // dM/d log r_i, and dM/d Sigma_ii collecting the likelihood and trace terms.
    const Eigen::VectorXd a = (0.5 * (w.beta.array().square() - a_inverse.diagonal().array()) * w.r.array()).matrix();
    const Eigen::VectorXd c = (-0.5 * a.array() - 0.25).matrix();

    Eigen::VectorXd grad(2 * kp + 1 + n);

    const Eigen::MatrixXd wa = w.beta * w.beta.transpose() - a_inverse;
    grad.head(kp) = 0.5 * kernel_gradient_contractions(x, params.kernel_f, w.kf, wa);

    // K_g enters through mu, diag(Sigma) and the KL term.
    const Eigen::MatrixXd p = Eigen::MatrixXd::Identity(n, n) -
                              w.sqrt_lambda.asDiagonal() * w.b_inverse * w.sqrt_lambda.asDiagonal() * w.kg;
    const Eigen::MatrixXd b_inv2 = w.b_inverse * w.b_inverse;
    Eigen::MatrixXd g = w.v * a.transpose() + p * c.asDiagonal() * p.transpose();
    g -= 0.5 * (w.sqrt_lambda.asDiagonal() * (w.b_inverse - b_inv2) * w.sqrt_lambda.asDiagonal());
    g -= 0.5 * w.v * w.v.transpose();
    grad.segment(kp, kp) = kernel_gradient_contractions(x, params.kernel_g, w.kg, g);

    grad(2 * kp) = a.sum();

    const Eigen::MatrixXd sigma_sq = w.sigma.cwiseProduct(w.sigma);
    const Eigen::VectorXd d_lambda = w.kg * (a - w.v) - sigma_sq * (c + 0.5 * lambda);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double dlambda_drho = -std::expm1(-lambda(i));  // sigmoid(rho)
        grad(2 * kp + 1 + i) = d_lambda(i) * dlambda_drho;
    }

    MvBoundResult out;
    out.value = -(w.log_likelihood - w.trace_term - w.kl);
    out.gradient = -grad;
    return out;
}

double gaussian_kl(const Eigen::Ref<const Eigen::VectorXd>& mean_q, const Eigen::Ref<const Eigen::MatrixXd>& cov_q,
                   const Eigen::Ref<const Eigen::VectorXd>& mean_p, const Eigen::Ref<const Eigen::MatrixXd>& cov_p) {
    const Eigen::Index n = mean_q.size();
    require(mean_p.size() == n && cov_q.rows() == n && cov_q.cols() == n && cov_p.rows() == n && cov_p.cols() == n,
            ErrorKind::dimension_mismatch, "gaussian_kl: mean and covariance sizes differ");
    const Eigen::LLT<Eigen::MatrixXd> lq(cov_q);
    const Eigen::LLT<Eigen::MatrixXd> lp(cov_p);
    require(lq.info() == Eigen::Success && lp.info() == Eigen::Success, ErrorKind::not_positive_definite,
            "gaussian_kl: covariance is not positive definite");
    const auto log_det = [](const Eigen::LLT<Eigen::MatrixXd>& l) {
        return 2.0 * l.matrixL().toDenseMatrix().diagonal().array().log().sum();
    };
    const Eigen::VectorXd diff = mean_p - mean_q;
    const double trace = lp.solve(cov_q).trace();
    return 0.5 * (trace + diff.dot(lp.solve(diff)) - static_cast<double>(n) + log_det(lp) - log_det(lq));
}

double vhgpr_predictive_variance(double f_variance, double g_mean, double g_variance) {
    return f_variance + std::exp(g_mean + 0.5 * g_variance);
}

VhgprModel::VhgprModel(VhgprParams params, Eigen::MatrixXd x, Eigen::VectorXd y, double target_offset)
    : params_(std::move(params)), x_(std::move(x)), y_(std::move(y)), target_offset_(target_offset) {
    require(std::isfinite(target_offset_), ErrorKind::invalid_argument, "target offset must be finite");
    const Eigen::VectorXd centered = y_.array() - target_offset_;
    BoundWork w = compute_bound(params_, x_, centered);
    sqrt_lambda_ = std::move(w.sqrt_lambda);
    v_ = std::move(w.v);
    mu_ = std::move(w.mu);
    sigma_diag_ = w.sigma.diagonal();
    r_ = std::move(w.r);
    chol_a_ = std::move(w.chol_a);
    chol_b_ = std::move(w.chol_b);
    beta_ = std::move(w.beta);
    bound_ = w.log_likelihood - w.trace_term - w.kl;
}

VhgprLatentMoments VhgprModel::latent_moments(const Eigen::Ref<const Eigen::MatrixXd>& queries) const {
    require(queries.cols() == x_.cols(), ErrorKind::dimension_mismatch,
            "vhgpr_predict: query has " + std::to_string(queries.cols()) + " columns, model expects " +
                std::to_string(x_.cols()));
    VhgprLatentMoments m;
    const Eigen::MatrixXd kf = kernel_matrix(x_, queries, params_.kernel_f);
    m.f_mean = (kf.transpose() * beta_).array() + target_offset_;
    const Eigen::MatrixXd vf = chol_a_.llt.matrixL().solve(kf);
    m.f_variance = (params_.kernel_f.output_variance() - vf.colwise().squaredNorm().transpose().array()).max(0.0);

    const Eigen::MatrixXd kg = kernel_matrix(x_, queries, params_.kernel_g);
    m.g_mean = (kg.transpose() * v_).array() + params_.mu0;
    const Eigen::MatrixXd scaled = sqrt_lambda_.asDiagonal() * kg;
    const Eigen::MatrixXd vg = chol_b_.llt.matrixL().solve(scaled);
    m.g_variance = (params_.kernel_g.output_variance() - vg.colwise().squaredNorm().transpose().array()).max(0.0);
    return m;
}

Eigen::VectorXd VhgprModel::noise_variance(const Eigen::Ref<const Eigen::MatrixXd>& queries) const {
    const VhgprLatentMoments m = latent_moments(queries);
    return (m.g_mean.array() + 0.5 * m.g_variance.array()).exp();
}

PredictiveMoments VhgprModel::predict(const Eigen::Ref<const Eigen::MatrixXd>& queries) const {
    const VhgprLatentMoments m = latent_moments(queries);
    PredictiveMoments out;
    out.query_inputs = queries;
    out.mean = m.f_mean;
    out.variance.resize(queries.rows());
    for (Eigen::Index i = 0; i < queries.rows(); ++i) {
        out.variance(i) = vhgpr_predictive_variance(m.f_variance(i), m.g_mean(i), m.g_variance(i));
    }
    return out;
}

PredictiveMoments vhgpr_predict(const VhgprModel& model, const Eigen::Ref<const Eigen::MatrixXd>& queries) {
    return model.predict(queries);
}

VhgprParams vhgpr_initial_params(const SgprModel& sgpr) {
    VhgprParams p;
    p.kernel_f = sgpr.kernel();
    p.kernel_g = KernelParams(0.0, sgpr.kernel().log_length_scales);
    p.mu0 = sgpr.log_noise_variance();
    p.variational_lambda = Eigen::VectorXd::Constant(sgpr.train_inputs().rows(), 0.5);
    return p;
}

VhgprModel train_vhgpr(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                       const OptimizerConfig& config, VhgprTrainingReport* report) {
    VhgprTrainingReport local;
    VhgprTrainingReport& rep = report ? *report : local;
    rep = {};

    const SgprModel sgpr = train_sgpr(x, y, config, &rep.sgpr);
    const double offset = sgpr.target_offset();
    const Eigen::VectorXd target = y.array() - offset;
    const Eigen::Index d = x.cols();
    const Eigen::Index n = x.rows();
    const Eigen::Index n_hyper = 2 * (d + 1) + 1;

    const Eigen::VectorXd base = pack_vhgpr_params(vhgpr_initial_params(sgpr));
    std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> jitter(0.0, config.restart_log_std);
    std::vector<Eigen::VectorXd> starts{base};
    for (int r = 0; r < config.n_restarts; ++r) {
        Eigen::VectorXd p = base;
        for (Eigen::Index i = 0; i < n_hyper; ++i) p(i) += jitter(rng);
        starts.push_back(std::move(p));
    }

    const Objective objective = [&](const Eigen::VectorXd& theta, Eigen::VectorXd& gradient) {
        const MvBoundResult r = mv_bound(unpack_vhgpr_params(theta, d, n), x, target);
        gradient = r.gradient;
        return r.value;
    };

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
        rep.initial_bounds.push_back(-initial);
        rep.final_bounds.push_back(-result.value);
        rep.traces.push_back(result.trace);
        if (std::isfinite(result.value) && result.value < best_value) {
            best_value = result.value;
            best_theta = result.x;
            rep.best_restart = i;
        }
    }
    if (!std::isfinite(best_value)) {
        fail(ErrorKind::optimizer_failure, "train_vhgpr: no restart produced a finite variational bound");
    }
    VhgprModel model(unpack_vhgpr_params(best_theta, d, n), x, y, offset);
    for (const auto& w : sgpr.warnings()) model.add_warning(w);
    return model;
}

}  // namespace gwquant
