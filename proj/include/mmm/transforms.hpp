#pragma once

#include <span>
#include <vector>

namespace mmm {

/// Geometric carryover: weight alpha^tau on the activity tau weeks back,
/// truncated after `ell` weeks.
struct AdstockParams {
    double alpha = 0.0;  ///< decay rate per week, 0 <= alpha < 1
    int ell = 1;         ///< carryover window in weeks, >= 1
};

/// Weibull CDF saturation curve.
struct SaturationParams {
    double k = 1.0;       ///< shape, > 0
    double lambda = 1.0;  ///< scale, > 0, in units of the adstocked input
};

/// Value of the Weibull saturation together with its partial derivatives.
struct SaturationEval {
    double value = 0.0;
    double d_x = 0.0;
    double d_k = 0.0;
    double d_lambda = 0.0;
};

/**
 * Adstocked series c[t] = sum_{tau=0}^{ell-1} alpha^tau x[t-tau].
 *
 * Only weeks with a full carryover window are produced: for an input of
 * length w the output has length w - ell + 1 and element q corresponds to
 * input week q + ell - 1 (0-based). Earlier weeks are dropped, never padded.
 * alpha = 0 gives back x (0^0 is taken as 1).
 *
 * Throws DimensionError if x is shorter than ell and DomainError for alpha
 * outside [0, 1), ell < 1 or non-finite input.
 */
std::vector<double> adstock(std::span<const double> x, const AdstockParams& p);

/// Derivative of adstock() with respect to alpha, same alignment.
std::vector<double> adstock_dalpha(std::span<const double> x, const AdstockParams& p);

/// 1 - exp(-(x / lambda)^k). Throws DomainError for x < 0 or k, lambda <= 0.
double weibull_cdf(double x, const SaturationParams& p);

/// Weibull value and partials. The k- and lambda-partials are 0 at x = 0,
/// where the curve is identically 0 for every shape and scale.
SaturationEval weibull_eval(double x, const SaturationParams& p);

/// r[t] = beta * weibull_cdf(adstock(x)[t]).
std::vector<double> response(std::span<const double> x, double beta, const AdstockParams& a,
                             const SaturationParams& s);

}  // namespace mmm
