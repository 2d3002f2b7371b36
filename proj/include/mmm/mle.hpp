#pragma once

#include "mmm/lbfgsb.hpp"
#include "mmm/model.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace mmm {

/**
 * Multistart maximum likelihood. Strict positivity constraints (k, lambda,
 * the variances) and the decay's open interval are enforced as closed boxes
 * pulled in by `epsilon`; sign-constrained coefficients get a lower bound of
 * exactly zero.
 *
 * Each restart starts from a uniform draw inside the box intersected with the
 * prior mean +- 2 prior sd (the decay's interval comes from its logit-normal
 * prior). `fixed` pins parameters by flat name to the given values.
 */
struct MleConfig {
    int restarts = 20;
    int max_iterations = 1000;
    double gtol = 1e-6;
    double epsilon = 1e-6;
    std::uint64_t seed = 1;
    std::map<std::string, double> fixed;

    void validate() const;
};

struct RestartTrace {
    int index = 0;
    Eigen::VectorXd start;
    Eigen::VectorXd estimate;
    double log_likelihood = 0.0;  ///< at `estimate`; -inf if the start was invalid
    int iterations = 0;
    double projected_gradient_norm = 0.0;
    SolverStatus status = SolverStatus::MaxIterations;
    std::vector<double> trace;  ///< log-likelihood per accepted iterate (nondecreasing)
};

struct MleResult {
    std::vector<std::string> names;
    Eigen::VectorXd estimate;  ///< best restart, original scale
    double log_likelihood = 0.0;
    int best_restart = 0;
    std::vector<RestartTrace> restarts;
};

/// Box used by the optimizer, in flat order.
struct ParameterBox {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
};

ParameterBox mle_bounds(const ModelSpec& spec, double epsilon);

/// Interval each restart's starting value is drawn from.
ParameterBox mle_start_box(const ModelSpec& spec, double epsilon);

/**
 * Maximize the joint likelihood with truncated random-coefficient densities
 * (including their mean-dependent normalisers). The best restart is the one
 * with the largest log-likelihood, ties going to the lower restart index.
 * Throws OptimizationError if every restart fails before its first step.
 */
MleResult fit_mle(const PanelDataset& data, const ModelSpec& spec, const MleConfig& config);

}  // namespace mmm
