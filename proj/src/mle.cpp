#include "mmm/mle.hpp"

#include "mmm/errors.hpp"
#include "mmm/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace mmm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double logistic(double v) { return 1.0 / (1.0 + std::exp(-v)); }

struct Interval {
    double low;
    double high;
};

Interval normal_range(const NormalPrior& prior) {
    return {prior.mean - 2.0 * prior.sd, prior.mean + 2.0 * prior.sd};
}

Interval gamma_range(const GammaPrior& prior) {
    const double mean = prior.shape / prior.rate;
    const double sd = std::sqrt(prior.shape) / prior.rate;
    return {mean - 2.0 * sd, mean + 2.0 * sd};
}

// Inverse-gamma laws without a finite variance fall back to [scale/20, 2*scale].
Interval inverse_gamma_range(const InverseGammaPrior& prior) {
    if (prior.shape > 2.0) {
        const double mean = prior.scale / (prior.shape - 1.0);
        const double sd = mean / std::sqrt(prior.shape - 2.0);
        return {mean - 2.0 * sd, mean + 2.0 * sd};
    }
    return {prior.scale / 20.0, 2.0 * prior.scale};
}

Interval prior_range(const ParamInfo& info, const ModelSpec& spec) {
    const PriorConfig& pc = spec.priors;
    switch (info.kind) {
        case ParamKind::Alpha: {
            const Interval logit = normal_range(pc.alpha_logit);
            return {logistic(logit.low), logistic(logit.high)};
        }
        case ParamKind::Shape: return gamma_range(pc.shape);
        case ParamKind::Scale: return gamma_range(pc.scale);
        case ParamKind::Beta:
        case ParamKind::BetaRandom:
            return normal_range(spec.beta_constrained(info.index) ? pc.constrained_coef
                                                                  : pc.unconstrained_coef);
        case ParamKind::Gamma:
        case ParamKind::GammaRandom:
            return normal_range(spec.gamma_constrained(info.index) ? pc.constrained_coef
                                                                   : pc.unconstrained_coef);
        case ParamKind::Eta2:
        case ParamKind::Xi2:
            if (pc.random_variance_family == VariancePriorFamily::TruncatedNormal)
                return normal_range(pc.random_variance_tn);
            return inverse_gamma_range(pc.random_variance_ig);
        case ParamKind::Sigma2: return inverse_gamma_range(pc.residual_variance);
    }
    return {0.0, 1.0};
}

}  // namespace

void MleConfig::validate() const {
    if (restarts < 1) throw DomainError("MleConfig: restarts must be >= 1, got " + std::to_string(restarts));
    if (max_iterations < 1) throw DomainError("MleConfig: max_iterations must be >= 1");
    if (!(gtol > 0.0)) throw DomainError("MleConfig: gtol must be positive");
    if (!(epsilon > 0.0 && epsilon < 0.5)) throw DomainError("MleConfig: epsilon must lie in (0, 0.5)");
}

ParameterBox mle_bounds(const ModelSpec& spec, double epsilon) {
    const ParameterLayout layout(spec);
    const auto dim = static_cast<Eigen::Index>(layout.size());
    ParameterBox box{Eigen::VectorXd(dim), Eigen::VectorXd(dim)};
    for (Eigen::Index d = 0; d < dim; ++d) {
        const ParamInfo& info = layout[static_cast<std::size_t>(d)];
        switch (info.kind) {
            case ParamKind::Alpha:
                box.lower(d) = epsilon;
                box.upper(d) = 1.0 - epsilon;
                break;
            case ParamKind::Shape:
            case ParamKind::Scale:
            case ParamKind::Eta2:
            case ParamKind::Xi2:
            case ParamKind::Sigma2:
                box.lower(d) = epsilon;
                box.upper(d) = kInf;
                break;
            default:
                box.lower(d) = info.lower;
                box.upper(d) = kInf;
                break;
        }
    }
    return box;
}

ParameterBox mle_start_box(const ModelSpec& spec, double epsilon) {
    const ParameterLayout layout(spec);
    ParameterBox box = mle_bounds(spec, epsilon);
    for (Eigen::Index d = 0; d < box.lower.size(); ++d) {
        const Interval range = prior_range(layout[static_cast<std::size_t>(d)], spec);
        box.lower(d) = std::max(box.lower(d), range.low);
        box.upper(d) = std::min(box.upper(d), range.high);
        if (box.upper(d) < box.lower(d)) box.upper(d) = box.lower(d);
    }
    return box;
}

MleResult fit_mle(const PanelDataset& data, const ModelSpec& spec, const MleConfig& config) {
    spec.validate();
    config.validate();
    data.validate_against(spec);

    const ParameterLayout layout(spec);
    const auto names = layout.names();
    ParameterBox bounds = mle_bounds(spec, config.epsilon);
    ParameterBox start_box = mle_start_box(spec, config.epsilon);

    for (const auto& [name, value] : config.fixed) {
        const auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) throw StructuralError("fit_mle: unknown fixed parameter '" + name + "'");
        const auto d = static_cast<Eigen::Index>(it - names.begin());
        if (!(value >= bounds.lower(d) && value <= bounds.upper(d)))
            throw DomainError("fit_mle: fixed value for '" + name + "' lies outside its bounds");
        bounds.lower(d) = bounds.upper(d) = value;
        start_box.lower(d) = start_box.upper(d) = value;
    }

    const BoxObjective objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
        LogDensityResult ll = log_likelihood_with_gradient(x, data, spec, RandomEffectDensity::Truncated);
        if (!std::isfinite(ll.value)) return kInf;
        grad = -ll.gradient;
        return -ll.value;
    };

    LbfgsbOptions options;
    options.max_iterations = config.max_iterations;
    options.gtol = config.gtol;

    MleResult result;
    result.names = names;
    result.log_likelihood = -kInf;
    result.best_restart = -1;

    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int r = 0; r < config.restarts; ++r) {
        Eigen::VectorXd start(start_box.lower.size());
        for (Eigen::Index d = 0; d < start.size(); ++d)
            start(d) = start_box.lower(d) + unit(rng) * (start_box.upper(d) - start_box.lower(d));

        const SolverResult solved = minimize_box(objective, start, bounds.lower, bounds.upper, options);
        RestartTrace trace;
        trace.index = r;
        trace.start = start;
        trace.estimate = solved.x;
        trace.iterations = solved.iterations;
        trace.status = solved.status;
        trace.projected_gradient_norm = solved.projected_gradient_norm;
        trace.log_likelihood = solved.status == SolverStatus::InvalidStart ? -kInf : -solved.value;
        trace.trace.reserve(solved.trace.size());
        for (double f : solved.trace) trace.trace.push_back(-f);

        if (trace.log_likelihood > result.log_likelihood) {
            result.log_likelihood = trace.log_likelihood;
            result.estimate = trace.estimate;
            result.best_restart = r;
        }
        result.restarts.push_back(std::move(trace));
    }

    const bool all_failed = std::all_of(result.restarts.begin(), result.restarts.end(), [](const RestartTrace& t) {
        return t.iterations == 0 && t.status != SolverStatus::Converged;
    });
    if (all_failed || result.best_restart < 0) {
        std::string detail;
        for (const auto& t : result.restarts) {
            if (!detail.empty()) detail += ", ";
            detail += std::to_string(t.index) + ":" + to_string(t.status);
        }
        throw OptimizationError("fit_mle: every restart failed at iteration 0 (" + detail + ")");
    }
    return result;
}

}  // namespace mmm
