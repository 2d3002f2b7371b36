#include "mmm/distributions.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace mmm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kLogSqrt2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

}  // namespace

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double log_std_normal_cdf(double x) {
    if (x > -30.0) return std::log(std_normal_cdf(x));
    // Asymptotic series of the Mills ratio; erfc underflows near x = -38.
    const double x2 = x * x;
    const double series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
    return -0.5 * x2 - kLogSqrt2Pi - std::log(-x) + std::log(series);
}

double inverse_mills_ratio(double x) {
    if (x > -30.0) {
        return std::exp(-0.5 * x * x - kLogSqrt2Pi) / std_normal_cdf(x);
    }
    return std::exp(-0.5 * x * x - kLogSqrt2Pi - log_std_normal_cdf(x));
}

double log_normal_pdf(double v, double mean, double sd) {
    const double z = (v - mean) / sd;
    return -0.5 * z * z - kLogSqrt2Pi - std::log(sd);
}

double log_trunc_normal(double v, double mean, double sd) {
    if (v < 0.0) return kNegInf;
    const double log_zeta = -std::log(sd) - log_std_normal_cdf(mean / sd);
    const double z = (v - mean) / sd;
    return log_zeta - 0.5 * z * z - kLogSqrt2Pi;
}

double log_truncation_factor(double mean, double sd) { return -log_std_normal_cdf(mean / sd); }

TruncationFactorGrad log_truncation_factor_grad(double mean, double sd) {
    const double a = mean / sd;
    const double r = inverse_mills_ratio(a);
    return {-r / sd, r * a / sd};
}

double log_gamma_pdf(double v, double shape, double rate) {
    if (!(v > 0.0)) return kNegInf;
    return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(v) - rate * v;
}

double log_inv_gamma_pdf(double v, double shape, double scale) {
    if (!(v > 0.0)) return kNegInf;
    return shape * std::log(scale) - std::lgamma(shape) - (shape + 1.0) * std::log(v) - scale / v;
}

}  // namespace mmm
