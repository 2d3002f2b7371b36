#pragma once

#include <Eigen/Core>

#include <functional>
#include <string>
#include <vector>

namespace mmm {

/// Objective value at x; writes the gradient into the second argument.
/// Returning +inf (or NaN) marks x as outside the objective's domain.
using BoxObjective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

struct LbfgsbOptions {
    int max_iterations = 1000;
    int memory = 10;
    double gtol = 1e-6;    ///< on the infinity norm of the projected gradient
    double ftol = 1e-13;   ///< relative decrease below which the run counts as stalled
    int max_backtracks = 60;
    double armijo = 1e-4;
};

enum class SolverStatus {
    Converged,         ///< projected gradient norm <= gtol
    Stalled,           ///< objective stopped decreasing (relative change below ftol)
    MaxIterations,
    LineSearchFailed,  ///< no decrease along the projected search path
    InvalidStart       ///< objective not finite at the projected starting point
};

std::string to_string(SolverStatus status);

struct SolverResult {
    Eigen::VectorXd x;
    double value = 0.0;
    Eigen::VectorXd gradient;
    double projected_gradient_norm = 0.0;
    int iterations = 0;
    int evaluations = 0;
    SolverStatus status = SolverStatus::MaxIterations;
    std::vector<double> trace;  ///< objective after each accepted iterate, starting point first
};

/// x - clamp(x - g, lower, upper), infinity norm.
double projected_gradient_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& gradient,
                               const Eigen::VectorXd& lower, const Eigen::VectorXd& upper);

/**
 * Minimize a smooth function over the box [lower, upper] with a projected
 * limited-memory BFGS iteration. The quasi-Newton direction is built on the
 * variables that are not held at a bound, and each step backtracks along the
 * projected path until the Armijo condition holds, so the objective never
 * increases and every iterate lies in the box. Setting lower == upper for a
 * coordinate holds it fixed.
 */
SolverResult minimize_box(const BoxObjective& objective, const Eigen::VectorXd& start,
                          const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                          const LbfgsbOptions& options = {});

}  // namespace mmm
