#include <cmath>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "gwquant/error.hpp"
#include "gwquant/optimizer.hpp"

namespace gwquant {
namespace {

double rosenbrock(const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g.resize(x.size());
    g.setZero();
    double f = 0.0;
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
        const double a = x(i + 1) - x(i) * x(i);
        const double b = 1.0 - x(i);
        f += 100.0 * a * a + b * b;
        g(i) += -400.0 * a * x(i) - 2.0 * b;
        g(i + 1) += 200.0 * a;
    }
    return f;
}

TEST(Lbfgs, SolvesRosenbrock) {
    Eigen::VectorXd x0(4);
    x0 << -1.2, 1.0, -1.2, 1.0;
    const MinimizeResult r = minimize_lbfgs(rosenbrock, x0);
    EXPECT_TRUE(r.converged) << r.stop_reason;
    EXPECT_LT((r.x - Eigen::VectorXd::Ones(4)).norm(), 1e-5);
    EXPECT_LT(r.value, 1e-10);
}

TEST(Lbfgs, TraceStrictlyDecreases) {
    Eigen::VectorXd x0(2);
    x0 << -1.2, 1.0;
    const MinimizeResult r = minimize_lbfgs(rosenbrock, x0);
    ASSERT_GE(r.trace.size(), 2u);
    for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_LT(r.trace[i], r.trace[i - 1]);
}

TEST(Lbfgs, QuadraticConvergesToExactMinimizer) {
    Eigen::MatrixXd a(3, 3);
    a << 4, 1, 0, 1, 3, 0.5, 0, 0.5, 2;
    Eigen::VectorXd b(3);
    b << 1, -2, 0.5;
    const Objective f = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        g = a * x - b;
        return 0.5 * x.dot(a * x) - b.dot(x);
    };
    const MinimizeResult r = minimize_lbfgs(f, Eigen::VectorXd::Zero(3));
    EXPECT_LT((r.x - a.ldlt().solve(b)).norm(), 1e-6);
}

TEST(Lbfgs, InfeasibleRegionsAreAvoided) {
    // f = (x - 2)^2, undefined (throws) for x > 3; start at 0.
    const Objective f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        if (x(0) > 3.0) fail(ErrorKind::not_positive_definite, "outside domain");
        g.resize(1);
        g(0) = 2.0 * (x(0) - 2.0);
        return (x(0) - 2.0) * (x(0) - 2.0);
    };
    const MinimizeResult r = minimize_lbfgs(f, Eigen::VectorXd::Zero(1));
    EXPECT_NEAR(r.x(0), 2.0, 1e-6);
}

TEST(Lbfgs, InfeasibleStartReportsFailure) {
    const Objective f = [](const Eigen::VectorXd&, Eigen::VectorXd&) -> double {
        fail(ErrorKind::not_positive_definite, "never feasible");
    };
    const MinimizeResult r = minimize_lbfgs(f, Eigen::VectorXd::Zero(2));
    EXPECT_FALSE(r.converged);
    EXPECT_TRUE(std::isinf(r.value));
}

TEST(Lbfgs, RespectsIterationBudget) {
    LbfgsOptions opts;
    opts.max_iterations = 3;
    Eigen::VectorXd x0(2);
    x0 << -1.2, 1.0;
    const MinimizeResult r = minimize_lbfgs(rosenbrock, x0, opts);
    EXPECT_LE(r.iterations, 3);
    EXPECT_FALSE(r.converged);
}

}  // namespace
}  // namespace gwquant
