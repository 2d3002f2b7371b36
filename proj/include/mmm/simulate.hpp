#pragma once

#include "mmm/model.hpp"

#include <cstdint>

namespace mmm {

/// Independent uniform laws for media and non-constant nuisance covariates.
struct CovariateLaw {
    double x_low = 0.0;
    double x_high = 2.0;
    double z_low = 0.0;
    double z_high = 2.0;
};

/**
 * A synthetic scenario. When `intercept` is set the last nuisance column is
 * a column of ones; the other covariates are drawn i.i.d. from `law`.
 */
struct ScenarioConfig {
    ModelSpec spec;
    int w = 52;
    Parameters truth;
    CovariateLaw law;
    bool intercept = true;
    std::uint64_t seed = 1;
    int case_id = 0;  ///< 0 for custom scenarios, 1-8 for presets

    void validate() const;

    /**
     * Simulation-study presets. Cases 1-4 are base models with (m, w) =
     * (2, 52), (2, 104), (4, 104), (4, 208); cases 5-8 repeat them with g = 2
     * regions and random coefficients. n = 2: one covariate z1 plus the
     * intercept column z2. Every coefficient is sign-constrained. Truth:
     * alpha = 0.5, k = 0.2, lambda = 0.8, beta = gamma = 1, sigma2 = 0.25 and,
     * for cases 5-8, eta2 = xi2 = 0.25 with every random coefficient at 1.
     */
    static ScenarioConfig preset(int case_id, std::uint64_t seed);
};

struct Scenario {
    ModelSpec spec;
    PanelDataset data;
    Parameters truth;
};

/**
 * Draw covariates, then y = predict(truth) + N(0, sigma2) noise for weeks
 * ell..w. The first ell - 1 weeks (never fitted) get only the nuisance part
 * plus noise. Fully determined by the seed.
 */
Scenario generate(const ScenarioConfig& config);

}  // namespace mmm
