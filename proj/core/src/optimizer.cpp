#include "gwquant/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "gwquant/error.hpp"

namespace gwquant {

namespace {

struct Point {
    double alpha = 0.0;
    double value = std::numeric_limits<double>::infinity();
    double slope = 0.0;
    Eigen::VectorXd x;
    Eigen::VectorXd gradient;
    [[nodiscard]] bool finite() const { return std::isfinite(value) && std::isfinite(slope); }
};

class LineSearch {
public:
    LineSearch(const Objective& objective, const LbfgsOptions& options, int& evaluations)
        : objective_(objective), options_(options), evaluations_(evaluations) {}

    /// Returns the accepted point, or a point with infinite value on failure.
    Point search(const Eigen::VectorXd& x, double value, const Eigen::VectorXd& direction, double slope0,
                 double alpha_init) {
        x_ = &x;
        d_ = &direction;
        f0_ = value;
        slope0_ = slope0;

        Point prev;
        prev.alpha = 0.0;
        prev.value = value;
        prev.slope = slope0;
        double alpha = alpha_init;
        Point best_armijo;

        for (int i = 0; i < options_.max_line_search_steps; ++i) {
            Point cur = evaluate(alpha);
            if (!cur.finite()) {
                alpha = 0.5 * (prev.alpha + alpha);
                if (alpha <= prev.alpha + 1e-300) break;
                continue;
            }
            if (cur.value > f0_ + options_.armijo * alpha * slope0_ || (i > 0 && cur.value >= prev.value)) {
                return zoom(prev, cur);
            }
            best_armijo = cur;
            if (std::abs(cur.slope) <= -options_.curvature * slope0_) return cur;
            if (cur.slope >= 0.0) return zoom(cur, prev);
            prev = cur;
            alpha *= 2.0;
        }
        return best_armijo;
    }

private:
    Point evaluate(double alpha) {
        Point p;
        p.alpha = alpha;
        p.x = *x_ + alpha * *d_;
        p.gradient = Eigen::VectorXd::Zero(p.x.size());
        ++evaluations_;
        try {
            p.value = objective_(p.x, p.gradient);
            p.slope = p.gradient.dot(*d_);
            if (!p.gradient.allFinite()) p.value = std::numeric_limits<double>::infinity();
        } catch (const Error&) {
            p.value = std::numeric_limits<double>::infinity();
        }
        return p;
    }

    Point zoom(Point lo, Point hi) {
        for (int j = 0; j < options_.max_line_search_steps; ++j) {
            double alpha = 0.5 * (lo.alpha + hi.alpha);
            if (lo.finite() && hi.finite()) {
                // Cubic interpolation through both endpoints, safeguarded to the interior.
                const double d1 = lo.slope + hi.slope - 3.0 * (lo.value - hi.value) / (lo.alpha - hi.alpha);
                const double disc = d1 * d1 - lo.slope * hi.slope;
                if (disc >= 0.0) {
                    const double d2 = std::copysign(std::sqrt(disc), hi.alpha - lo.alpha);
                    const double trial =
                        hi.alpha - (hi.alpha - lo.alpha) * (hi.slope + d2 - d1) / (hi.slope - lo.slope + 2.0 * d2);
                    const double a = std::min(lo.alpha, hi.alpha), b = std::max(lo.alpha, hi.alpha);
                    const double margin = 0.1 * (b - a);
                    if (std::isfinite(trial) && trial > a + margin && trial < b - margin) alpha = trial;
                }
            }
            if (std::abs(hi.alpha - lo.alpha) < 1e-16 * std::max(1.0, std::abs(lo.alpha))) break;
            Point cur = evaluate(alpha);
            if (!cur.finite() || cur.value > f0_ + options_.armijo * alpha * slope0_ || cur.value >= lo.value) {
                hi = cur;
                hi.alpha = alpha;
                if (!cur.finite()) hi.value = std::numeric_limits<double>::infinity();
                continue;
            }
            if (std::abs(cur.slope) <= -options_.curvature * slope0_) return cur;
            if (cur.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
            lo = cur;
        }
        // lo always satisfies sufficient decrease when alpha > 0.
        if (lo.alpha > 0.0 && lo.finite()) return lo;
        return Point{};
    }

    const Objective& objective_;
    const LbfgsOptions& options_;
    int& evaluations_;
    const Eigen::VectorXd* x_ = nullptr;
    const Eigen::VectorXd* d_ = nullptr;
    double f0_ = 0.0;
    double slope0_ = 0.0;
};

}  // namespace

MinimizeResult minimize_lbfgs(const Objective& objective, Eigen::VectorXd x0, const LbfgsOptions& options) {
    MinimizeResult result;
    result.x = std::move(x0);
    result.gradient = Eigen::VectorXd::Zero(result.x.size());
    ++result.evaluations;
    try {
        result.value = objective(result.x, result.gradient);
    } catch (const Error&) {
        result.value = std::numeric_limits<double>::infinity();
    }
    if (!std::isfinite(result.value) || !result.gradient.allFinite()) {
        result.value = std::numeric_limits<double>::infinity();
        result.stop_reason = "objective not finite at start point";
        return result;
    }
    result.trace.push_back(result.value);

    std::deque<Eigen::VectorXd> s_hist, y_hist;
    std::deque<double> rho_hist;
    LineSearch line_search(objective, options, result.evaluations);

    for (int iter = 0; iter < options.max_iterations; ++iter) {
        if (result.gradient.lpNorm<Eigen::Infinity>() <= options.gradient_tolerance) {
            result.converged = true;
            result.stop_reason = "gradient tolerance";
            return result;
        }

        // Two-loop recursion.
        Eigen::VectorXd q = result.gradient;
        std::vector<double> alphas(s_hist.size());
        for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
            alphas[static_cast<std::size_t>(i)] = rho_hist[static_cast<std::size_t>(i)] * s_hist[static_cast<std::size_t>(i)].dot(q);
            q -= alphas[static_cast<std::size_t>(i)] * y_hist[static_cast<std::size_t>(i)];
        }
        if (!s_hist.empty()) q *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
        for (std::size_t i = 0; i < s_hist.size(); ++i) {
            const double beta = rho_hist[i] * y_hist[i].dot(q);
            q += (alphas[i] - beta) * s_hist[i];
        }
        Eigen::VectorXd direction = -q;
        double slope = direction.dot(result.gradient);
        if (!(slope < 0.0) || !direction.allFinite()) {
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            direction = -result.gradient;
            slope = -result.gradient.squaredNorm();
        }
        const double alpha_init =
            s_hist.empty() ? std::min(1.0, 1.0 / std::max(result.gradient.lpNorm<Eigen::Infinity>(), 1e-12)) : 1.0;

        Point next = line_search.search(result.x, result.value, direction, slope, alpha_init);
        if (!std::isfinite(next.value) || !(next.value < result.value)) {
            if (!s_hist.empty()) {
                // Retry once from steepest descent before giving up.
                s_hist.clear();
                y_hist.clear();
                rho_hist.clear();
                continue;
            }
            result.stop_reason = "line search failed";
            return result;
        }

        const Eigen::VectorXd s = next.x - result.x;
        const Eigen::VectorXd y = next.gradient - result.gradient;
        const double sy = s.dot(y);
        const double previous = result.value;
        result.x = std::move(next.x);
        result.value = next.value;
        result.gradient = std::move(next.gradient);
        result.iterations = iter + 1;
        result.trace.push_back(result.value);

        if (sy > 1e-10 * s.norm() * y.norm()) {
            s_hist.push_back(s);
            y_hist.push_back(y);
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > options.memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }

        if (std::abs(previous - result.value) <=
            options.relative_tolerance * std::max({std::abs(previous), std::abs(result.value), 1.0})) {
            result.converged = true;
            result.stop_reason = "relative objective change";
            return result;
        }
    }
    result.stop_reason = "iteration limit";
    return result;
}

}  // namespace gwquant
