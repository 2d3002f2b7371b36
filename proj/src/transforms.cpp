#include "mmm/transforms.hpp"

#include "mmm/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace mmm {

namespace {

void check_adstock_args(std::span<const double> x, const AdstockParams& p) {
    if (!(p.alpha >= 0.0 && p.alpha < 1.0)) {
        throw DomainError("adstock: alpha must lie in [0, 1), got " + std::to_string(p.alpha));
    }
    if (p.ell < 1) {
        throw DomainError("adstock: ell must be >= 1, got " + std::to_string(p.ell));
    }
    if (x.size() < static_cast<std::size_t>(p.ell)) {
        throw DimensionError("adstock: series of length " + std::to_string(x.size()) +
                             " is shorter than the carryover window " + std::to_string(p.ell));
    }
    for (std::size_t t = 0; t < x.size(); ++t) {
        if (!std::isfinite(x[t])) {
            throw DomainError("adstock: non-finite input at index " + std::to_string(t));
        }
    }
}

void check_saturation_args(double x, const SaturationParams& p) {
    if (!(x >= 0.0)) {
        throw DomainError("weibull: input must be >= 0, got " + std::to_string(x));
    }
    if (!(p.k > 0.0) || !(p.lambda > 0.0)) {
        throw DomainError("weibull: shape and scale must be > 0");
    }
}

}  // namespace

std::vector<double> adstock(std::span<const double> x, const AdstockParams& p) {
    check_adstock_args(x, p);
    const std::size_t ell = static_cast<std::size_t>(p.ell);
    std::vector<double> out(x.size() - ell + 1, 0.0);
    for (std::size_t q = 0; q < out.size(); ++q) {
        const std::size_t t = q + ell - 1;
        double weight = 1.0;
        double acc = 0.0;
        for (std::size_t tau = 0; tau < ell; ++tau) {
            acc += weight * x[t - tau];
            weight *= p.alpha;
        }
        out[q] = acc;
    }
    return out;
}

std::vector<double> adstock_dalpha(std::span<const double> x, const AdstockParams& p) {
    check_adstock_args(x, p);
    const std::size_t ell = static_cast<std::size_t>(p.ell);
    std::vector<double> out(x.size() - ell + 1, 0.0);
    for (std::size_t q = 0; q < out.size(); ++q) {
        const std::size_t t = q + ell - 1;
        double power = 1.0;  // alpha^(tau-1)
        double acc = 0.0;
        for (std::size_t tau = 1; tau < ell; ++tau) {
            acc += static_cast<double>(tau) * power * x[t - tau];
            power *= p.alpha;
        }
        out[q] = acc;
    }
    return out;
}

double weibull_cdf(double x, const SaturationParams& p) {
    check_saturation_args(x, p);
    if (x == 0.0) return 0.0;
    return -std::expm1(-std::pow(x / p.lambda, p.k));
}

SaturationEval weibull_eval(double x, const SaturationParams& p) {
    check_saturation_args(x, p);
    SaturationEval e;
    if (x == 0.0) {
        // d/dx at the origin: finite only for k >= 1
        if (p.k == 1.0) {
            e.d_x = 1.0 / p.lambda;
        } else if (p.k < 1.0) {
            e.d_x = std::numeric_limits<double>::infinity();
        }
        return e;
    }
    const double ratio = x / p.lambda;
    const double log_ratio = std::log(ratio);
    const double log_u = p.k * log_ratio;
    const double u = std::exp(log_u);
    e.value = -std::expm1(-u);
    // u * exp(-u) in log space: u may overflow while the product is 0
    const double common = std::exp(log_u - u);
    e.d_x = common * p.k / x;
    e.d_k = common * log_ratio;
    e.d_lambda = -common * p.k / p.lambda;
    return e;
}

std::vector<double> response(std::span<const double> x, double beta, const AdstockParams& a,
                             const SaturationParams& s) {
    std::vector<double> out = adstock(x, a);
    for (double& v : out) v = beta * weibull_cdf(v, s);
    return out;
}

}  // namespace mmm
