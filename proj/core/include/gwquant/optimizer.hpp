#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace gwquant {

/// Objective for minimization: returns f(x) and writes grad f(x) into `gradient`.
/// Throwing gwquant::Error or returning a non-finite value marks x infeasible;
/// the line search then backs off.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& gradient)>;

struct LbfgsOptions {
    int max_iterations = 500;
    double gradient_tolerance = 1e-6;   // on the infinity norm
    double relative_tolerance = 1e-10;  // on the objective change
    int memory = 10;
    int max_line_search_steps = 40;
    double armijo = 1e-4;
    double curvature = 0.9;
};

struct MinimizeResult {
    Eigen::VectorXd x;
    double value = 0.0;
    Eigen::VectorXd gradient;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
    std::string stop_reason;
    /// Objective value at the start point and at every accepted iterate.
    std::vector<double> trace;
};

/// Limited-memory BFGS with a strong-Wolfe line search. Accepted iterates
/// always satisfy the sufficient-decrease condition, so the trace is
/// strictly decreasing.
MinimizeResult minimize_lbfgs(const Objective& objective, Eigen::VectorXd x0, const LbfgsOptions& options = {});

/// Training settings shared by the standard and heteroscedastic models.
struct OptimizerConfig {
    LbfgsOptions lbfgs;
    int n_restarts = 5;
    std::uint64_t seed = 0;
    double restart_log_std = 0.5;
    bool center_targets = false;
};

}  // namespace gwquant
