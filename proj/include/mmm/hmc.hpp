#pragma once

#include "mmm/model.hpp"
#include "mmm/posterior.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace mmm {

/**
 * Sampler settings. Defaults follow the simulation study: 20000 iterations,
 * the first 10000 discarded, every 20th retained afterwards (500 draws).
 *
 * During burn-in the step size is adapted multiplicatively after each
 * iteration (up by exp(adapt_rate * (1 - target)) on accept, down by
 * exp(-adapt_rate * target) on reject), which drives the acceptance rate to
 * `target_acceptance`. It is frozen afterwards. Each iteration uses the
 * current step size times a uniform jitter in [1 - step_jitter, 1 + step_jitter].
 */
struct HmcConfig {
    int iterations = 20000;
    int burn_in = 10000;
    int thinning = 20;
    int leapfrog_steps = 20;
    double step_size = 0.01;
    double target_acceptance = 0.65;
    bool adapt = true;
    double adapt_rate = 0.02;
    double step_jitter = 0.1;
    double init_noise_sd = 0.01;
    int max_reflections = 100;
    std::uint64_t seed = 1;

    void validate() const;
    int retained() const { return (iterations - burn_in) / thinning; }
};

/// Box on the sampler coordinates; +-inf for unbounded sides.
struct Bounds {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    static Bounds unbounded(Eigen::Index dim);
    static Bounds lower_only(Eigen::VectorXd lower);
};

struct Reflection {
    double value;
    double velocity;
};

/// Bounce off a lower guard rail: a value below `lower` is mirrored to
/// 2*lower - value and the velocity flips sign. Feasible values pass through.
Reflection reflect(double value, double velocity, double lower = 0.0);

/// Mirror repeatedly off both ends of [lower, upper] until inside. Returns
/// false if still outside after `max_passes` reflections.
bool reflect_into_box(double& value, double& velocity, double lower, double upper, int max_passes);

using LogDensityFn = std::function<LogDensityResult(const Eigen::VectorXd&)>;

/// Position, velocity and the log-density (with gradient) at the position.
struct PhasePoint {
    Eigen::VectorXd position;
    Eigen::VectorXd velocity;
    LogDensityResult density;
};

enum class StepStatus { Ok, ReflectionLimit, OutOfSupport };

struct StepResult {
    PhasePoint point;
    StepStatus status = StepStatus::Ok;
};

/**
 * One leapfrog step on U = -log P with identity mass: half velocity step,
 * full position step (reflected coordinate-wise into `bounds`), half
 * velocity step. `start.density` must hold the gradient at start.position.
 * Throws SamplerError if the log-density is finite but its gradient is not.
 */
StepResult leapfrog_step(const PhasePoint& start, const LogDensityFn& log_density, double step_size,
                         const Bounds& bounds, int max_reflections = 100);

/// min(1, exp(logp_prop - |v_end|^2/2 - logp_cur + |v_start|^2/2)); 0 if logp_prop is -inf.
double acceptance_probability(double logp_current, const Eigen::VectorXd& v_start, double logp_proposal,
                              const Eigen::VectorXd& v_end);

/// Metropolis decision with one uniform draw from `rng`.
bool accept(double logp_current, const Eigen::VectorXd& v_start, double logp_proposal,
            const Eigen::VectorXd& v_end, std::mt19937_64& rng);

/// A generic sampling target in sampler coordinates.
struct Target {
    LogDensityFn log_density;
    Bounds bounds;
};

/// Raw output of the generic sampler, in sampler coordinates.
struct ChainDraws {
    std::vector<Eigen::VectorXd> draws;
    double acceptance_rate = 0.0;          ///< after burn-in
    double burn_in_acceptance_rate = 0.0;
    double step_size = 0.0;                ///< frozen post-burn-in step size
    std::vector<double> log_density_trace; ///< one value per iteration
};

/// Run HMC on an arbitrary target from a feasible starting point.
ChainDraws sample(const Target& target, const Eigen::VectorXd& initial, const HmcConfig& config);

/// Retained draws of a model fit, on the original parameter scale.
struct SampleChain {
    std::vector<std::string> names;
    Eigen::MatrixXd draws;  ///< retained x parameters
    double acceptance_rate = 0.0;
    double burn_in_acceptance_rate = 0.0;
    double step_size = 0.0;
    std::vector<double> log_posterior_trace;
    HmcConfig config;
};

/// Prior-mean starting point on the original scale (alpha 0.5, k and lambda
/// at their Gamma means, coefficients at their prior locations, variances 1).
Eigen::VectorXd default_initial_point(const ModelSpec& spec);

/// Full model fit: starts from default_initial_point() plus seeded noise.
SampleChain run_chain(const PanelDataset& data, const ModelSpec& spec, const HmcConfig& config);

}  // namespace mmm
