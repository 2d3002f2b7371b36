#include "mmm/posterior.hpp"

#include "mmm/distributions.hpp"
#include "mmm/errors.hpp"
#include "mmm/transforms.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace mmm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInf = std::numeric_limits<double>::infinity();

bool entry_feasible(const ParamInfo& info, double v) {
    if (!std::isfinite(v)) return false;
    switch (info.kind) {
        case ParamKind::Alpha:
            return v >= 0.0 && v < 1.0;
        case ParamKind::Shape:
        case ParamKind::Scale:
        case ParamKind::Eta2:
        case ParamKind::Xi2:
        case ParamKind::Sigma2:
            return v > 0.0;
        default:
            return v >= info.lower;
    }
}

bool flat_feasible(const Eigen::VectorXd& flat, const ParameterLayout& layout) {
    for (std::size_t idx = 0; idx < layout.size(); ++idx) {
        if (!entry_feasible(layout[idx], flat(static_cast<Eigen::Index>(idx)))) return false;
    }
    return true;
}

void check_length(const Eigen::VectorXd& flat, const ParameterLayout& layout, const char* what) {
    if (static_cast<std::size_t>(flat.size()) != layout.size()) {
        throw StructuralError(std::string(what) + ": expected " + std::to_string(layout.size()) +
                              " parameters, got " + std::to_string(flat.size()));
    }
}

LogDensityResult infeasible(std::size_t size) {
    return {kNegInf, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size))};
}

/// Residual log-likelihood summed over regions and fitted weeks.
void add_data_term(const Eigen::VectorXd& flat, const PanelDataset& data, const ModelSpec& spec,
                   const ParameterLayout& layout, LogDensityResult& out) {
    const int w = data.weeks();
    const int rows = spec.fitted_weeks(w);
    const auto ell = static_cast<std::size_t>(spec.ell);
    const double sigma2 = flat(layout.sigma2());
    const double log_norm = -0.5 * std::log(2.0 * std::numbers::pi * sigma2);

    Eigen::MatrixXd sat(rows, spec.m), d_alpha(rows, spec.m), d_k(rows, spec.m), d_lambda(rows, spec.m);
    for (int v = 0; v < spec.g; ++v) {
        const RegionPanel& region = data.regions[static_cast<std::size_t>(v)];
        Eigen::VectorXd fitted = Eigen::VectorXd::Zero(rows);
        for (int i = 0; i < spec.m; ++i) {
            const double alpha = flat(layout.alpha(i));
            const SaturationParams sp{flat(layout.k(i)), flat(layout.lambda(i))};
            const double* x = region.x.col(i).data();
            for (int q = 0; q < rows; ++q) {
                const std::size_t t = static_cast<std::size_t>(q) + ell - 1;
                double c = x[t];
                double dc = 0.0;
                double weight = 1.0;  // alpha^(tau-1)
                for (std::size_t tau = 1; tau < ell; ++tau) {
                    dc += static_cast<double>(tau) * weight * x[t - tau];
                    weight *= alpha;
                    c += weight * x[t - tau];
                }
                const SaturationEval e = weibull_eval(c, sp);
                sat(q, i) = e.value;
                d_alpha(q, i) = (c > 0.0) ? e.d_x * dc : 0.0;
                d_k(q, i) = e.d_k;
                d_lambda(q, i) = e.d_lambda;
            }
            const double b = spec.hierarchical ? flat(layout.beta_r(i, v)) : flat(layout.beta(i));
            fitted += b * sat.col(i);
        }
        for (int j = 0; j < spec.n; ++j) {
            const double c = spec.hierarchical ? flat(layout.gamma_r(j, v)) : flat(layout.gamma(j));
            fitted += c * region.z.col(j).tail(rows);
        }
        const Eigen::VectorXd resid = region.y.tail(rows) - fitted;
        const double ss = resid.squaredNorm();
        out.value += rows * log_norm - 0.5 * ss / sigma2;

        const Eigen::VectorXd u = resid / sigma2;
        for (int i = 0; i < spec.m; ++i) {
            const int bidx = spec.hierarchical ? layout.beta_r(i, v) : layout.beta(i);
            const double b = flat(bidx);
            out.gradient(bidx) += u.dot(sat.col(i));
            out.gradient(layout.alpha(i)) += b * u.dot(d_alpha.col(i));
            out.gradient(layout.k(i)) += b * u.dot(d_k.col(i));
            out.gradient(layout.lambda(i)) += b * u.dot(d_lambda.col(i));
        }
        for (int j = 0; j < spec.n; ++j) {
            const int gidx = spec.hierarchical ? layout.gamma_r(j, v) : layout.gamma(j);
            out.gradient(gidx) += u.dot(region.z.col(j).tail(rows));
        }
        out.gradient(layout.sigma2()) += -0.5 * rows / sigma2 + 0.5 * ss / (sigma2 * sigma2);
    }
}

/// log N(coef | mean, var) with partials, plus the truncation factor when requested.
void add_random_coef(double coef, int coef_idx, double mean, int mean_idx, double var, int var_idx,
                     bool truncated, LogDensityResult& out) {
    const double diff = coef - mean;
    out.value += -0.5 * diff * diff / var - 0.5 * std::log(2.0 * std::numbers::pi * var);
    out.gradient(coef_idx) += -diff / var;
    out.gradient(mean_idx) += diff / var;
    out.gradient(var_idx) += 0.5 * diff * diff / (var * var) - 0.5 / var;
    if (truncated) {
        const double sd = std::sqrt(var);
        out.value += log_truncation_factor(mean, sd);
        const TruncationFactorGrad tg = log_truncation_factor_grad(mean, sd);
        out.gradient(mean_idx) += tg.d_mean;
        out.gradient(var_idx) += tg.d_sd / (2.0 * sd);
    }
}

void add_random_effect_term(const Eigen::VectorXd& flat, const ModelSpec& spec,
                            const ParameterLayout& layout, RandomEffectDensity density,
                            LogDensityResult& out) {
    if (!spec.hierarchical) return;
    const bool truncate = density == RandomEffectDensity::Truncated;
    for (int v = 0; v < spec.g; ++v) {
        for (int i = 0; i < spec.m; ++i) {
            add_random_coef(flat(layout.beta_r(i, v)), layout.beta_r(i, v), flat(layout.beta(i)),
                            layout.beta(i), flat(layout.eta2(i)), layout.eta2(i),
                            truncate && spec.beta_constrained(i), out);
        }
        for (int j = 0; j < spec.n; ++j) {
            add_random_coef(flat(layout.gamma_r(j, v)), layout.gamma_r(j, v), flat(layout.gamma(j)),
                            layout.gamma(j), flat(layout.xi2(j)), layout.xi2(j),
                            truncate && spec.gamma_constrained(j), out);
        }
    }
}

double logistic(double a) {
    return a >= 0.0 ? 1.0 / (1.0 + std::exp(-a)) : std::exp(a) / (1.0 + std::exp(a));
}

/// Prior density on a regression coefficient (fixed mean or, in literal mode, random).
void add_coef_prior(double v, int idx, bool constrained, const PriorConfig& pc, LogDensityResult& out) {
    if (constrained) {
        out.value += log_trunc_normal(v, pc.constrained_coef.mean, pc.constrained_coef.sd);
        out.gradient(idx) += -(v - pc.constrained_coef.mean) /
                             (pc.constrained_coef.sd * pc.constrained_coef.sd);
    } else {
        out.value += log_normal_pdf(v, pc.unconstrained_coef.mean, pc.unconstrained_coef.sd);
        out.gradient(idx) += -(v - pc.unconstrained_coef.mean) /
                             (pc.unconstrained_coef.sd * pc.unconstrained_coef.sd);
    }
}

void add_gamma_prior(double v, int idx, const GammaPrior& p, LogDensityResult& out) {
    out.value += log_gamma_pdf(v, p.shape, p.rate);
    out.gradient(idx) += (p.shape - 1.0) / v - p.rate;
}

void add_inv_gamma_prior(double v, int idx, const InverseGammaPrior& p, LogDensityResult& out) {
    out.value += log_inv_gamma_pdf(v, p.shape, p.scale);
    out.gradient(idx) += -(p.shape + 1.0) / v + p.scale / (v * v);
}

void add_variance_prior(double v, int idx, const PriorConfig& pc, LogDensityResult& out) {
    if (pc.random_variance_family == VariancePriorFamily::TruncatedNormal) {
        out.value += log_trunc_normal(v, pc.random_variance_tn.mean, pc.random_variance_tn.sd);
        out.gradient(idx) += -(v - pc.random_variance_tn.mean) /
                             (pc.random_variance_tn.sd * pc.random_variance_tn.sd);
    } else {
        add_inv_gamma_prior(v, idx, pc.random_variance_ig, out);
    }
}

/// Prior in sampler coordinates; `flat` is the same point on the original scale.
void add_prior_term(const Eigen::VectorXd& coords, const Eigen::VectorXd& flat, const ModelSpec& spec,
                    const ParameterLayout& layout, LogDensityResult& out) {
    const PriorConfig& pc = spec.priors;
    for (int i = 0; i < spec.m; ++i) {
        const double a = coords(layout.alpha(i));
        out.value += log_normal_pdf(a, pc.alpha_logit.mean, pc.alpha_logit.sd);
        out.gradient(layout.alpha(i)) += -(a - pc.alpha_logit.mean) / (pc.alpha_logit.sd * pc.alpha_logit.sd);
        add_gamma_prior(flat(layout.k(i)), layout.k(i), pc.shape, out);
        add_gamma_prior(flat(layout.lambda(i)), layout.lambda(i), pc.scale, out);
        add_coef_prior(flat(layout.beta(i)), layout.beta(i), spec.beta_constrained(i), pc, out);
    }
    for (int j = 0; j < spec.n; ++j) {
        add_coef_prior(flat(layout.gamma(j)), layout.gamma(j), spec.gamma_constrained(j), pc, out);
    }
    if (spec.hierarchical) {
        for (int i = 0; i < spec.m; ++i) add_variance_prior(flat(layout.eta2(i)), layout.eta2(i), pc, out);
        for (int j = 0; j < spec.n; ++j) add_variance_prior(flat(layout.xi2(j)), layout.xi2(j), pc, out);
        if (pc.literal_random_coef_prior) {
            for (int v = 0; v < spec.g; ++v) {
                for (int i = 0; i < spec.m; ++i)
                    add_coef_prior(flat(layout.beta_r(i, v)), layout.beta_r(i, v), spec.beta_constrained(i),
                                   pc, out);
                for (int j = 0; j < spec.n; ++j)
                    add_coef_prior(flat(layout.gamma_r(j, v)), layout.gamma_r(j, v),
                                   spec.gamma_constrained(j), pc, out);
            }
        }
        // indicator-only otherwise: feasibility was checked by the caller
    }
    add_inv_gamma_prior(flat(layout.sigma2()), layout.sigma2(), pc.residual_variance, out);
}

}  // namespace

LogDensityResult log_likelihood_with_gradient(const Eigen::VectorXd& flat, const PanelDataset& data,
                                              const ModelSpec& spec, RandomEffectDensity density) {
    const ParameterLayout layout(spec);
    check_length(flat, layout, "log_likelihood");
    if (!flat_feasible(flat, layout)) return infeasible(layout.size());
    LogDensityResult out{0.0, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(layout.size()))};
    add_data_term(flat, data, spec, layout, out);
    add_random_effect_term(flat, spec, layout, density, out);
    return out;
}

double log_likelihood_constrained(const Parameters& theta, const PanelDataset& data,
                                  const ModelSpec& spec) {
    return log_likelihood_with_gradient(pack(theta, spec), data, spec, RandomEffectDensity::Truncated).value;
}

double log_likelihood_untruncated(const Parameters& theta, const PanelDataset& data,
                                  const ModelSpec& spec) {
    return log_likelihood_with_gradient(pack(theta, spec), data, spec, RandomEffectDensity::Untruncated)
        .value;
}

double sum_log_truncation_factors(const Parameters& theta, const ModelSpec& spec) {
    if (!spec.hierarchical) return 0.0;
    double total = 0.0;
    for (int v = 0; v < spec.g; ++v) {
        for (int i : spec.sign_constrained_beta) total += log_truncation_factor(theta.beta(i), std::sqrt(theta.eta2(i)));
        for (int j : spec.sign_constrained_gamma) total += log_truncation_factor(theta.gamma(j), std::sqrt(theta.xi2(j)));
    }
    return total;
}

double log_prior(const Parameters& theta, const ModelSpec& spec) {
    const Eigen::VectorXd flat = pack(theta, spec);
    const ParameterLayout layout(spec);
    if (!flat_feasible(flat, layout)) return kNegInf;
    LogDensityResult out{0.0, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(layout.size()))};
    add_prior_term(to_sampler_coords(flat, spec), flat, spec, layout, out);
    return out.value;
}

Eigen::VectorXd to_sampler_coords(const Eigen::VectorXd& flat, const ModelSpec& spec) {
    const ParameterLayout layout(spec);
    check_length(flat, layout, "to_sampler_coords");
    Eigen::VectorXd coords = flat;
    for (std::size_t idx = 0; idx < layout.size(); ++idx) {
        const auto d = static_cast<Eigen::Index>(idx);
        if (layout[idx].reparam == Reparam::Logit) {
            coords(d) = std::log(flat(d)) - std::log1p(-flat(d));
        } else if (layout[idx].reparam == Reparam::Log) {
            coords(d) = std::log(flat(d));
        }
    }
    return coords;
}

Eigen::VectorXd from_sampler_coords(const Eigen::VectorXd& coords, const ModelSpec& spec) {
    const ParameterLayout layout(spec);
    check_length(coords, layout, "from_sampler_coords");
    Eigen::VectorXd flat = coords;
    for (std::size_t idx = 0; idx < layout.size(); ++idx) {
        const auto d = static_cast<Eigen::Index>(idx);
        if (layout[idx].reparam == Reparam::Logit) {
            flat(d) = logistic(coords(d));
        } else if (layout[idx].reparam == Reparam::Log) {
            flat(d) = std::exp(coords(d));
        }
    }
    return flat;
}

Eigen::VectorXd sampler_lower_bounds(const ModelSpec& spec) {
    const ParameterLayout layout(spec);
    Eigen::VectorXd lower(static_cast<Eigen::Index>(layout.size()));
    for (std::size_t idx = 0; idx < layout.size(); ++idx) {
        const ParamInfo& info = layout[idx];
        lower(static_cast<Eigen::Index>(idx)) = info.reparam == Reparam::Identity ? info.lower : -kInf;
    }
    return lower;
}

LogDensityResult log_posterior_hmc(const Eigen::VectorXd& coords, const PanelDataset& data,
                                   const ModelSpec& spec) {
    const ParameterLayout layout(spec);
    check_length(coords, layout, "log_posterior_hmc");
    if (!coords.allFinite()) return infeasible(layout.size());
    const Eigen::VectorXd flat = from_sampler_coords(coords, spec);
    // logistic() can round to exactly 1 for large logits
    if (!flat_feasible(flat, layout)) return infeasible(layout.size());

    LogDensityResult out = log_likelihood_with_gradient(flat, data, spec, RandomEffectDensity::Untruncated);
    for (int i = 0; i < spec.m; ++i) {
        const double a = flat(layout.alpha(i));
        out.gradient(layout.alpha(i)) *= a * (1.0 - a);
    }
    add_prior_term(coords, flat, spec, layout, out);
    // priors on log-carried coordinates are stated on the original scale
    for (std::size_t idx = 0; idx < layout.size(); ++idx) {
        if (layout[idx].reparam != Reparam::Log) continue;
        const auto d = static_cast<Eigen::Index>(idx);
        out.gradient(d) = out.gradient(d) * flat(d) + 1.0;
        out.value += coords(d);
    }
    if (std::isnan(out.value)) out.value = kNegInf;
    return out;
}

}  // namespace mmm
