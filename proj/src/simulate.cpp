#include "mmm/simulate.hpp"

#include "mmm/errors.hpp"

#include <cmath>
#include <numeric>
#include <random>

namespace mmm {

void ScenarioConfig::validate() const {
    spec.validate();
    if (w < spec.ell) throw DimensionError("scenario: w must be >= ell");
    if (!(law.x_low >= 0.0) || !(law.x_high >= law.x_low)) {
        throw DomainError("scenario: media covariate law must be a nonnegative interval");
    }
    if (!(law.z_high >= law.z_low)) throw DomainError("scenario: nuisance covariate law is empty");
    if (intercept && spec.n < 1) throw StructuralError("scenario: an intercept needs n >= 1");
    if (!(truth.sigma2 >= 0.0)) throw DomainError("scenario: sigma2 must be >= 0");
    // sigma2 = 0 is allowed for noiseless data; check the rest with a stand-in
    Parameters probe = truth;
    if (probe.sigma2 == 0.0) probe.sigma2 = 1.0;
    check_feasible(probe, spec);
}

ScenarioConfig ScenarioConfig::preset(int case_id, std::uint64_t seed) {
    if (case_id < 1 || case_id > 8) {
        throw DomainError("scenario: preset case must be in 1..8, got " + std::to_string(case_id));
    }
    const int base = (case_id - 1) % 4;
    const bool hierarchical = case_id >= 5;
    static constexpr int kMedia[] = {2, 2, 4, 4};
    static constexpr int kWeeks[] = {52, 104, 104, 208};

    ScenarioConfig cfg;
    cfg.case_id = case_id;
    cfg.seed = seed;
    cfg.w = kWeeks[base];
    ModelSpec& s = cfg.spec;
    s.m = kMedia[base];
    s.n = 2;
    s.g = hierarchical ? 2 : 1;
    s.ell = 5;
    s.hierarchical = hierarchical;
    s.sign_constrained_beta.resize(static_cast<std::size_t>(s.m));
    std::iota(s.sign_constrained_beta.begin(), s.sign_constrained_beta.end(), 0);
    s.sign_constrained_gamma = {0, 1};

    Parameters& t = cfg.truth;
    t = Parameters::zeros(s);
    t.alpha.setConstant(0.5);
    t.k.setConstant(0.2);
    t.lambda.setConstant(0.8);
    t.beta.setConstant(1.0);
    t.gamma.setConstant(1.0);
    if (hierarchical) {
        t.eta2.setConstant(0.25);
        t.xi2.setConstant(0.25);
        t.beta_r.setConstant(1.0);
        t.gamma_r.setConstant(1.0);
    }
    t.sigma2 = 0.25;
    return cfg;
}

Scenario generate(const ScenarioConfig& config) {
    config.validate();
    const ModelSpec& spec = config.spec;
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> x_law(config.law.x_low, config.law.x_high);
    std::uniform_real_distribution<double> z_law(config.law.z_low, config.law.z_high);
    std::normal_distribution<double> noise(0.0, 1.0);
    const double sigma = std::sqrt(config.truth.sigma2);

    Scenario out;
    out.spec = spec;
    out.truth = config.truth;
    out.data.first_week = 1;
    for (int v = 0; v < spec.g; ++v) {
        RegionPanel region;
        region.label = "region" + std::to_string(v + 1);
        region.x.resize(config.w, spec.m);
        region.z.resize(config.w, spec.n);
        region.y = Eigen::VectorXd::Zero(config.w);
        const int drawn_z = config.intercept ? spec.n - 1 : spec.n;
        // row-wise draws keep a week's covariates together in the stream
        for (int t = 0; t < config.w; ++t) {
            for (int i = 0; i < spec.m; ++i) region.x(t, i) = x_law(rng);
            for (int j = 0; j < drawn_z; ++j) region.z(t, j) = z_law(rng);
            if (config.intercept) region.z(t, spec.n - 1) = 1.0;
        }
        out.data.regions.push_back(std::move(region));
    }

    Parameters noiseless = config.truth;
    if (noiseless.sigma2 == 0.0) noiseless.sigma2 = 1.0;
    const Eigen::MatrixXd fitted = predict(noiseless, out.data, spec);
    const int lead = spec.ell - 1;
    for (int v = 0; v < spec.g; ++v) {
        RegionPanel& region = out.data.regions[static_cast<std::size_t>(v)];
        for (int t = 0; t < config.w; ++t) {
            double mean = 0.0;
            if (t >= lead) {
                mean = fitted(t - lead, v);
            } else {
                for (int j = 0; j < spec.n; ++j) {
                    const double c = spec.hierarchical ? config.truth.gamma_r(j, v) : config.truth.gamma(j);
                    mean += c * region.z(t, j);
                }
            }
            region.y(t) = mean + sigma * noise(rng);
        }
    }
    return out;
}

}  // namespace mmm
