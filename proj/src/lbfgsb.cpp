#include "mmm/lbfgsb.hpp"

#include "mmm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace mmm {

namespace {

using Eigen::VectorXd;

struct CurvaturePair {
    VectorXd s;
    VectorXd y;
};

VectorXd project(const VectorXd& x, const VectorXd& lower, const VectorXd& upper) {
    return x.cwiseMax(lower).cwiseMin(upper);
}

// Coordinates pinned at a bound with the gradient pushing outward stay put
// for this iteration; the rest form the free set.
std::vector<bool> free_set(const VectorXd& x, const VectorXd& g, const VectorXd& lower,
                           const VectorXd& upper) {
    std::vector<bool> free(static_cast<std::size_t>(x.size()), true);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const bool at_lower = x[i] <= lower[i];
        const bool at_upper = x[i] >= upper[i];
        if ((at_lower && at_upper) || (at_lower && g[i] > 0.0) || (at_upper && g[i] < 0.0))
            free[static_cast<std::size_t>(i)] = false;
    }
    return free;
}

VectorXd masked(const VectorXd& v, const std::vector<bool>& free) {
    VectorXd out = v;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (!free[static_cast<std::size_t>(i)]) out[i] = 0.0;
    return out;
}

// Two-loop recursion restricted to the free coordinates.
VectorXd quasi_newton_direction(const VectorXd& g, const std::deque<CurvaturePair>& memory,
                                const std::vector<bool>& free) {
    VectorXd q = masked(g, free);
    std::vector<VectorXd> s_list, y_list;
    std::vector<double> rho;
    for (const auto& pair : memory) {
        VectorXd s = masked(pair.s, free);
        VectorXd y = masked(pair.y, free);
        const double sy = s.dot(y);
        if (sy > 1e-12 * y.squaredNorm() && sy > 0.0) {
            s_list.push_back(std::move(s));
            y_list.push_back(std::move(y));
            rho.push_back(1.0 / sy);
        }
    }
    const std::size_t count = s_list.size();
    std::vector<double> a(count);
    for (std::size_t idx = count; idx-- > 0;) {
        a[idx] = rho[idx] * s_list[idx].dot(q);
        q -= a[idx] * y_list[idx];
    }
    if (count > 0) q *= 1.0 / (rho.back() * y_list.back().squaredNorm());
    for (std::size_t idx = 0; idx < count; ++idx) {
        const double b = rho[idx] * y_list[idx].dot(q);
        q += (a[idx] - b) * s_list[idx];
    }
    return -q;
}

}  // namespace

std::string to_string(SolverStatus status) {
    switch (status) {
        case SolverStatus::Converged: return "converged";
        case SolverStatus::Stalled: return "stalled";
        case SolverStatus::MaxIterations: return "max_iterations";
        case SolverStatus::LineSearchFailed: return "line_search_failed";
        case SolverStatus::InvalidStart: return "invalid_start";
    }
    return "unknown";
}

double projected_gradient_norm(const VectorXd& x, const VectorXd& gradient, const VectorXd& lower,
                               const VectorXd& upper) {
    if (x.size() == 0) return 0.0;
    return (x - project(x - gradient, lower, upper)).lpNorm<Eigen::Infinity>();
}

SolverResult minimize_box(const BoxObjective& objective, const VectorXd& start, const VectorXd& lower,
                          const VectorXd& upper, const LbfgsbOptions& options) {
    const Eigen::Index dim = start.size();
    if (lower.size() != dim || upper.size() != dim)
        throw DimensionError("minimize_box: bounds have " + std::to_string(lower.size()) + "/" +
                             std::to_string(upper.size()) + " entries for a start of size " +
                             std::to_string(dim));
    for (Eigen::Index i = 0; i < dim; ++i)
        if (!(lower[i] <= upper[i]))
            throw DomainError("minimize_box: empty box at coordinate " + std::to_string(i));
    if (options.memory < 1 || options.max_iterations < 0 || options.max_backtracks < 1)
        throw DomainError("minimize_box: memory and max_backtracks must be positive");

    SolverResult result;
    result.x = project(start, lower, upper);
    result.gradient = VectorXd::Zero(dim);
    result.value = objective(result.x, result.gradient);
    result.evaluations = 1;
    if (!std::isfinite(result.value) || !result.gradient.allFinite()) {
        result.status = SolverStatus::InvalidStart;
        return result;
    }
    result.trace.push_back(result.value);

    std::deque<CurvaturePair> memory;
    VectorXd g_trial(dim);
    for (int iter = 0;; ++iter) {
        result.projected_gradient_norm = projected_gradient_norm(result.x, result.gradient, lower, upper);
        if (result.projected_gradient_norm <= options.gtol) {
            result.status = SolverStatus::Converged;
            return result;
        }
        if (iter >= options.max_iterations) {
            result.status = SolverStatus::MaxIterations;
            return result;
        }

        const auto free = free_set(result.x, result.gradient, lower, upper);
        bool accepted = false;
        VectorXd x_trial;
        double f_trial = 0.0;
        // Try the quasi-Newton direction first; on failure drop the memory
        // and retry once along the steepest-descent direction.
        for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
            if (attempt == 1 && memory.empty()) break;
            if (attempt == 1) memory.clear();
            VectorXd d = quasi_newton_direction(result.gradient, memory, free);
            double t = 1.0;
            if (memory.empty()) {
                const double gnorm = d.norm();
                t = gnorm > 1.0 ? 1.0 / gnorm : 1.0;
            }
            if (!(d.dot(result.gradient) < 0.0)) {
                d = -masked(result.gradient, free);
                t = std::min(1.0, 1.0 / std::max(d.norm(), 1e-300));
            }
            for (int bt = 0; bt < options.max_backtracks; ++bt, t *= 0.5) {
                x_trial = project(result.x + t * d, lower, upper);
                const VectorXd step = x_trial - result.x;
                if (step.lpNorm<Eigen::Infinity>() == 0.0) break;
                g_trial.setZero();
                f_trial = objective(x_trial, g_trial);
                ++result.evaluations;
                if (!std::isfinite(f_trial) || !g_trial.allFinite()) continue;
                if (f_trial <= result.value + options.armijo * result.gradient.dot(step) &&
                    f_trial <= result.value) {
                    accepted = true;
                    break;
                }
            }
        }
        if (!accepted) {
            result.status = SolverStatus::LineSearchFailed;
            return result;
        }

        CurvaturePair pair{x_trial - result.x, g_trial - result.gradient};
        if (pair.s.dot(pair.y) > 1e-12 * pair.y.squaredNorm()) {
            memory.push_back(std::move(pair));
            if (static_cast<int>(memory.size()) > options.memory) memory.pop_front();
        }
        const double decrease = result.value - f_trial;
        result.x = x_trial;
        result.value = f_trial;
        result.gradient = g_trial;
        result.iterations = iter + 1;
        result.trace.push_back(f_trial);
        if (decrease <= options.ftol * std::max(1.0, std::abs(f_trial))) {
            result.projected_gradient_norm =
                projected_gradient_norm(result.x, result.gradient, lower, upper);
            result.status = result.projected_gradient_norm <= options.gtol ? SolverStatus::Converged
                                                                           : SolverStatus::Stalled;
            return result;
        }
    }
}

}  // namespace mmm
