#include "mmm/hmc.hpp"

#include "mmm/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace mmm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

void HmcConfig::validate() const {
    if (iterations < 1) throw DomainError("hmc: iterations must be >= 1");
    if (burn_in < 0 || burn_in >= iterations) throw DomainError("hmc: burn_in must lie in [0, iterations)");
    if (thinning < 1) throw DomainError("hmc: thinning must be >= 1");
    if (leapfrog_steps < 1) throw DomainError("hmc: leapfrog_steps must be >= 1");
    if (!(step_size > 0.0)) throw DomainError("hmc: step_size must be > 0");
    if (!(target_acceptance > 0.0 && target_acceptance < 1.0))
        throw DomainError("hmc: target_acceptance must lie in (0, 1)");
    if (!(step_jitter >= 0.0 && step_jitter < 1.0)) throw DomainError("hmc: step_jitter must lie in [0, 1)");
    if (!(adapt_rate >= 0.0)) throw DomainError("hmc: adapt_rate must be >= 0");
    if (max_reflections < 1) throw DomainError("hmc: max_reflections must be >= 1");
}

Bounds Bounds::unbounded(Eigen::Index dim) {
    return {Eigen::VectorXd::Constant(dim, -kInf), Eigen::VectorXd::Constant(dim, kInf)};
}

Bounds Bounds::lower_only(Eigen::VectorXd lower) {
    const Eigen::Index dim = lower.size();
    return {std::move(lower), Eigen::VectorXd::Constant(dim, kInf)};
}

Reflection reflect(double value, double velocity, double lower) {
    if (value >= lower) return {value, velocity};
    return {2.0 * lower - value, -velocity};
}

bool reflect_into_box(double& value, double& velocity, double lower, double upper, int max_passes) {
    for (int pass = 0; pass < max_passes; ++pass) {
        if (value < lower) {
            value = 2.0 * lower - value;
            velocity = -velocity;
        } else if (value > upper) {
            value = 2.0 * upper - value;
            velocity = -velocity;
        } else {
            return true;
        }
    }
    return value >= lower && value <= upper;
}

StepResult leapfrog_step(const PhasePoint& start, const LogDensityFn& log_density, double step_size,
                         const Bounds& bounds, int max_reflections) {
    StepResult result;
    PhasePoint& p = result.point;
    p.velocity = start.velocity + 0.5 * step_size * start.density.gradient;
    p.position = start.position + step_size * p.velocity;
    for (Eigen::Index d = 0; d < p.position.size(); ++d) {
        if (!reflect_into_box(p.position(d), p.velocity(d), bounds.lower(d), bounds.upper(d),
                              max_reflections)) {
            result.status = StepStatus::ReflectionLimit;
            return result;
        }
    }
    p.density = log_density(p.position);
    if (!std::isfinite(p.density.value)) {
        result.status = StepStatus::OutOfSupport;
        return result;
    }
    if (!p.density.gradient.allFinite()) {
        throw SamplerError("leapfrog: non-finite gradient at a point with finite log-density");
    }
    p.velocity += 0.5 * step_size * p.density.gradient;
    return result;
}

double acceptance_probability(double logp_current, const Eigen::VectorXd& v_start, double logp_proposal,
                              const Eigen::VectorXd& v_end) {
    if (!std::isfinite(logp_proposal)) return 0.0;
    const double log_ratio =
        (logp_proposal - 0.5 * v_end.squaredNorm()) - (logp_current - 0.5 * v_start.squaredNorm());
    if (std::isnan(log_ratio)) return 0.0;
    return log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
}

bool accept(double logp_current, const Eigen::VectorXd& v_start, double logp_proposal,
            const Eigen::VectorXd& v_end, std::mt19937_64& rng) {
    const double p = acceptance_probability(logp_current, v_start, logp_proposal, v_end);
    if (p >= 1.0) return true;
    if (p <= 0.0) return false;
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

ChainDraws sample(const Target& target, const Eigen::VectorXd& initial, const HmcConfig& config) {
    config.validate();
    const Eigen::Index dim = initial.size();
    if (target.bounds.lower.size() != dim || target.bounds.upper.size() != dim) {
        throw StructuralError("hmc: bounds do not match the dimension of the starting point");
    }
    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> jitter(1.0 - config.step_jitter, 1.0 + config.step_jitter);

    PhasePoint current{initial, Eigen::VectorXd::Zero(dim), target.log_density(initial)};
    if (!std::isfinite(current.density.value) || !current.density.gradient.allFinite()) {
        throw SamplerError("hmc: starting point has zero posterior density or a non-finite gradient");
    }

    ChainDraws out;
    out.draws.reserve(static_cast<std::size_t>(config.retained()));
    out.log_density_trace.reserve(static_cast<std::size_t>(config.iterations));
    double step = config.step_size;
    const double up = std::exp(config.adapt_rate * (1.0 - config.target_acceptance));
    const double down = std::exp(-config.adapt_rate * config.target_acceptance);
    long accepted_burn = 0;
    long accepted_main = 0;

    for (int iter = 0; iter < config.iterations; ++iter) {
        const bool burning = iter < config.burn_in;
        Eigen::VectorXd v0(dim);
        for (Eigen::Index d = 0; d < dim; ++d) v0(d) = normal(rng);
        const double eps = step * (config.step_jitter > 0.0 ? jitter(rng) : 1.0);

        PhasePoint proposal{current.position, v0, current.density};
        bool feasible = true;
        try {
            for (int l = 0; l < config.leapfrog_steps; ++l) {
                StepResult r = leapfrog_step(proposal, target.log_density, eps, target.bounds,
                                             config.max_reflections);
                if (r.status != StepStatus::Ok) {
                    feasible = false;
                    break;
                }
                proposal = std::move(r.point);
            }
        } catch (const SamplerError& e) {
            std::ostringstream msg;
            msg << "hmc iteration " << iter << " (step size " << eps << "): " << e.what();
            throw SamplerError(msg.str());
        }

        const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const double p = feasible ? acceptance_probability(current.density.value, v0, proposal.density.value,
                                                           proposal.velocity)
                                  : 0.0;
        const bool take = u < p;
        if (take) {
            current.position = std::move(proposal.position);
            current.density = std::move(proposal.density);
        }

        if (burning) {
            accepted_burn += take ? 1 : 0;
            if (config.adapt) step *= take ? up : down;
            if (iter + 1 == config.burn_in) {
                const double rate = static_cast<double>(accepted_burn) / config.burn_in;
                if (rate < 0.01) {
                    std::ostringstream msg;
                    msg << "hmc: acceptance rate " << rate << " over " << config.burn_in
                        << " burn-in iterations is below 1%; try a smaller step_size or fewer "
                           "leapfrog_steps";
                    throw SamplerError(msg.str());
                }
            }
        } else {
            accepted_main += take ? 1 : 0;
            if ((iter - config.burn_in + 1) % config.thinning == 0) out.draws.push_back(current.position);
        }
        out.log_density_trace.push_back(current.density.value);
    }

    out.burn_in_acceptance_rate =
        config.burn_in > 0 ? static_cast<double>(accepted_burn) / config.burn_in : 0.0;
    out.acceptance_rate = static_cast<double>(accepted_main) / (config.iterations - config.burn_in);
    out.step_size = step;
    return out;
}

Eigen::VectorXd default_initial_point(const ModelSpec& spec) {
    const ParameterLayout layout(spec);
    const PriorConfig& pc = spec.priors;
    Eigen::VectorXd flat(static_cast<Eigen::Index>(layout.size()));
    for (std::size_t idx = 0; idx < layout.size(); ++idx) {
        const ParamInfo& info = layout[idx];
        double v = 1.0;
        switch (info.kind) {
            case ParamKind::Alpha:
                v = 0.5;
                break;
            case ParamKind::Shape:
                v = pc.shape.shape / pc.shape.rate;
                break;
            case ParamKind::Scale:
                v = pc.scale.shape / pc.scale.rate;
                break;
            case ParamKind::Beta:
            case ParamKind::BetaRandom:
                v = spec.beta_constrained(info.index) ? pc.constrained_coef.mean : pc.unconstrained_coef.mean;
                break;
            case ParamKind::Gamma:
            case ParamKind::GammaRandom:
                v = spec.gamma_constrained(info.index) ? pc.constrained_coef.mean : pc.unconstrained_coef.mean;
                break;
            case ParamKind::Eta2:
            case ParamKind::Xi2:
            case ParamKind::Sigma2:
                v = 1.0;
                break;
        }
        flat(static_cast<Eigen::Index>(idx)) = v;
    }
    return flat;
}

SampleChain run_chain(const PanelDataset& data, const ModelSpec& spec, const HmcConfig& config) {
    spec.validate();
    config.validate();
    data.validate_against(spec);

    Target target{[&](const Eigen::VectorXd& coords) { return log_posterior_hmc(coords, data, spec); },
                  Bounds::lower_only(sampler_lower_bounds(spec))};

    // Perturb the prior-mean start with its own stream so the sampler stream
    // is untouched by the dimension of the model.
    Eigen::VectorXd start = to_sampler_coords(default_initial_point(spec), spec);
    std::mt19937_64 init_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> noise(0.0, config.init_noise_sd);
    for (Eigen::Index d = 0; d < start.size(); ++d) {
        double v = start(d) + noise(init_rng);
        double dummy = 0.0;
        reflect_into_box(v, dummy, target.bounds.lower(d), target.bounds.upper(d), config.max_reflections);
        start(d) = v;
    }

    ChainDraws raw = sample(target, start, config);

    SampleChain chain;
    chain.names = ParameterLayout(spec).names();
    chain.draws.resize(static_cast<Eigen::Index>(raw.draws.size()), start.size());
    for (std::size_t r = 0; r < raw.draws.size(); ++r) {
        chain.draws.row(static_cast<Eigen::Index>(r)) = from_sampler_coords(raw.draws[r], spec).transpose();
    }
    chain.acceptance_rate = raw.acceptance_rate;
    chain.burn_in_acceptance_rate = raw.burn_in_acceptance_rate;
    chain.step_size = raw.step_size;
    chain.log_posterior_trace = std::move(raw.log_density_trace);
    chain.config = config;
    return chain;
}

}  // namespace mmm
