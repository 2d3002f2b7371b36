#pragma once

#include "mmm/model.hpp"

#include <Eigen/Core>

namespace mmm {

/// Log-density (nats) and its gradient, aligned with the flat packing order.
struct LogDensityResult {
    double value = 0.0;
    Eigen::VectorXd gradient;
};

/// How random coefficients of sign-constrained variables enter the likelihood.
enum class RandomEffectDensity {
    Truncated,   ///< [0, inf)-truncated normal with its mean-dependent normaliser
    Untruncated  ///< plain normal; the sign constraint lives in the prior
};

/**
 * Log-likelihood over weeks ell..w and all regions, plus (hierarchical
 * models) the density of every random coefficient around its fixed mean.
 * `flat` is on the original scale. Gradient is with respect to `flat`.
 * Returns value -inf (gradient zero) if any hard constraint is violated.
 */
LogDensityResult log_likelihood_with_gradient(const Eigen::VectorXd& flat, const PanelDataset& data,
                                              const ModelSpec& spec, RandomEffectDensity density);

/// Joint likelihood with truncated random-coefficient densities (the MLE objective).
double log_likelihood_constrained(const Parameters& theta, const PanelDataset& data,
                                  const ModelSpec& spec);

/// Joint likelihood with untruncated random-coefficient densities (the HMC likelihood).
double log_likelihood_untruncated(const Parameters& theta, const PanelDataset& data,
                                  const ModelSpec& spec);

/// Sum over sign-constrained random coefficients of log_truncation_factor(mean, eta).
/// Equals log_likelihood_constrained - log_likelihood_untruncated.
double sum_log_truncation_factors(const Parameters& theta, const ModelSpec& spec);

/// Log prior (alpha's prior is on the logit scale, no Jacobian).
double log_prior(const Parameters& theta, const ModelSpec& spec);

/// Original scale -> sampler coordinates (alpha on the logit scale, everything else as is).
Eigen::VectorXd to_sampler_coords(const Eigen::VectorXd& flat, const ModelSpec& spec);
/// Sampler coordinates -> original scale.
Eigen::VectorXd from_sampler_coords(const Eigen::VectorXd& coords, const ModelSpec& spec);
/// Lower bound of each sampler coordinate (-inf when unbounded); reflection acts on these.
Eigen::VectorXd sampler_lower_bounds(const ModelSpec& spec);

/**
 * log prior + log untruncated likelihood in sampler coordinates, with the
 * exact analytic gradient in those coordinates. Any bounded coordinate below
 * its bound gives value -inf.
 */
LogDensityResult log_posterior_hmc(const Eigen::VectorXd& coords, const PanelDataset& data,
                                   const ModelSpec& spec);

}  // namespace mmm
