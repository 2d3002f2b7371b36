#pragma once

// Scalar densities used by the likelihoods and priors. Log-densities return
// -infinity outside the support instead of throwing.

namespace mmm {

/// Standard normal CDF via erfc.
double std_normal_cdf(double x);

/// log Phi(x), accurate far into the lower tail.
double log_std_normal_cdf(double x);

/// phi(x) / Phi(x).
double inverse_mills_ratio(double x);

double log_normal_pdf(double v, double mean, double sd);

/**
 * Log-density of the normal(mean, sd^2) truncated to [0, inf):
 * log zeta(mean) + log phi((v - mean) / sd) with
 * zeta(mean) = 1 / (sd * (1 - Phi(-mean / sd))) and phi the standard normal pdf.
 */
double log_trunc_normal(double v, double mean, double sd);

/**
 * Log of the mean-dependent factor by which the [0, inf)-truncated normal
 * density exceeds the untruncated one: -log(1 - Phi(-mean / sd)).
 */
double log_truncation_factor(double mean, double sd);

/// Partials of log_truncation_factor with respect to mean and sd.
struct TruncationFactorGrad {
    double d_mean;
    double d_sd;
};
TruncationFactorGrad log_truncation_factor_grad(double mean, double sd);

/// Gamma(shape, rate) log-density; -inf for v <= 0.
double log_gamma_pdf(double v, double shape, double rate);

/// Inverse-gamma(shape, scale) log-density; -inf for v <= 0.
double log_inv_gamma_pdf(double v, double shape, double scale);

}  // namespace mmm
