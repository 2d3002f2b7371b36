#include "mmm/baseline.hpp"
#include "mmm/errors.hpp"
#include "mmm/simulate.hpp"
#include "test_support.hpp"

#include <Eigen/Cholesky>
#include <doctest.h>

#include <cmath>
#include <random>

using namespace mmm;

namespace {

// Single region, one media column, a covariate and an intercept column.
// y = beta * adstock_{alpha}(x) + gamma1 * z1 + gamma2, no saturation, no noise.
PanelDataset linear_adstock_panel(double alpha, int ell, double beta, int w, std::uint64_t seed, bool covariate) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    RegionPanel r;
    r.label = "north";
    r.x.resize(w, 1);
    r.z.resize(w, covariate ? 2 : 1);
    r.y.resize(w);
    for (int t = 0; t < w; ++t) {
        r.x(t, 0) = u(rng);
        if (covariate) r.z(t, 0) = u(rng);
        r.z(t, r.z.cols() - 1) = 1.0;
    }
    for (int t = 0; t < w; ++t) {
        const double media = t >= ell - 1 ? testing::naive_adstock(r.x.col(0), t, alpha, ell) : 0.0;
        r.y(t) = beta * media + (covariate ? 0.4 * r.z(t, 0) : 0.0) + 2.0;
    }
    PanelDataset d;
    d.regions.push_back(r);
    return d;
}

ModelSpec spec_for(const PanelDataset& d) {
    ModelSpec s;
    s.m = d.media_count();
    s.n = d.nuisance_count();
    s.g = d.region_count();
    s.sign_constrained_beta = {0};
    return s;
}

}  // namespace

TEST_CASE("noiseless data: the true decay is chosen and coefficients are exact") {
    const PanelDataset d = linear_adstock_panel(0.5, 5, 1.5, 80, 3, false);
    AdhocConfig cfg;
    const AdhocResult r = fit_adhoc(d, spec_for(d), cfg);
    CHECK(r.alpha[0] == 0.5);
    REQUIRE(r.coefficient_names == std::vector<std::string>{"beta_1", "gamma_1"});
    CHECK(r.coefficients(0) == doctest::Approx(1.5).epsilon(1e-10));
    CHECK(r.coefficients(1) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(r.correlations(0, 4) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(r.pooled_regions);
    CHECK_FALSE(r.any_sign_violation());
}

TEST_CASE("an intercept is added only when no nuisance column is constant") {
    PanelDataset d = linear_adstock_panel(0.3, 5, 1.0, 60, 4, true);
    AdhocConfig cfg;
    AdhocResult r = fit_adhoc(d, spec_for(d), cfg);
    CHECK(r.coefficient_names == std::vector<std::string>{"beta_1", "gamma_1", "gamma_2"});
    CHECK(r.coefficients(1) == doctest::Approx(0.4).epsilon(1e-9));

    // drop the constant column; y is unchanged so an intercept of 2 appears
    d.regions[0].z.conservativeResize(Eigen::NoChange, 1);
    r = fit_adhoc(d, spec_for(d), cfg);
    CHECK(r.coefficient_names == std::vector<std::string>{"beta_1", "gamma_1", "intercept"});
    CHECK(r.coefficients(2) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("OLS agrees with the normal equations") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::MatrixXd X(40, 4);
    Eigen::VectorXd y(40);
    for (int r = 0; r < 40; ++r) {
        for (int c = 0; c < 4; ++c) X(r, c) = n(rng);
        y(r) = n(rng);
    }
    const OlsFit fit = ols(X, y, {"a", "b", "c", "d"});
    const Eigen::VectorXd oracle = (X.transpose() * X).ldlt().solve(X.transpose() * y);
    CHECK((fit.coefficients - oracle).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((X.transpose() * fit.residuals).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("rank-deficient designs name the collinear columns") {
    Eigen::MatrixXd X(10, 3);
    for (int r = 0; r < 10; ++r) {
        X(r, 0) = 1.0;
        X(r, 1) = r;
        X(r, 2) = 3.0 - 2.0 * r;
    }
    try {
        ols(X, Eigen::VectorXd::Ones(10), {"one", "trend", "mixed"});
        FAIL("expected LinearAlgebraError");
    } catch (const LinearAlgebraError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("rank 2 of 3") != std::string::npos);
        const bool named = msg.find("one") != std::string::npos || msg.find("trend") != std::string::npos ||
                           msg.find("mixed") != std::string::npos;
        CHECK(named);
    }
    CHECK_THROWS_AS(ols(X, Eigen::VectorXd::Ones(9), {"a", "b", "c"}), DimensionError);
}

TEST_CASE("Pearson correlation") {
    Eigen::VectorXd a(5), b(5);
    a << 1, 2, 3, 4, 6;
    b << 2, 1, 4, 3, 7;
    const double r = pearson(a, b);
    CHECK(pearson((3.0 * a).array() + 7.0, b) == doctest::Approx(r).epsilon(1e-14));
    CHECK(pearson(-a, b) == doctest::Approx(-r).epsilon(1e-14));
    CHECK(pearson(a, a) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::isnan(pearson(Eigen::VectorXd::Constant(5, 2.0), b)));
}

TEST_CASE("all-NaN correlations fall back to the smallest grid value") {
    // a constant response leaves constant stage-one residuals
    PanelDataset d = linear_adstock_panel(0.5, 5, 0.0, 30, 5, false);
    AdhocConfig cfg;
    cfg.alpha_grid = {0.6, 0.2, 0.4};
    const AdhocResult r = fit_adhoc(d, spec_for(d), cfg);
    for (Eigen::Index a = 0; a < 3; ++a) CHECK(std::isnan(r.correlations(0, a)));
    CHECK(r.alpha[0] == 0.2);
    CHECK(std::abs(r.coefficients(0)) < 1e-12);
}

TEST_CASE("constant media makes the final design singular") {
    PanelDataset d = linear_adstock_panel(0.5, 5, 1.0, 30, 5, false);
    d.regions[0].x.setConstant(1.0);
    CHECK_THROWS_AS(fit_adhoc(d, spec_for(d), AdhocConfig{}), LinearAlgebraError);
}

TEST_CASE("sign flags mark negative constrained coefficients") {
    PanelDataset d = linear_adstock_panel(0.5, 5, -0.7, 60, 6, true);
    ModelSpec spec = spec_for(d);
    spec.sign_constrained_gamma = {0};
    const AdhocResult r = fit_adhoc(d, spec, AdhocConfig{});
    REQUIRE(r.sign_flags.size() == 2);
    CHECK(r.sign_flags[0].name == "beta_1");
    CHECK(r.sign_flags[0].violated);
    CHECK(r.sign_flags[1].name == "gamma_1");
    CHECK_FALSE(r.sign_flags[1].violated);
    CHECK(r.any_sign_violation());
}

TEST_CASE("pooled regions get dummies instead of constant columns") {
    const Scenario sc = generate(ScenarioConfig::preset(5, 2));
    const AdhocResult r = fit_adhoc(sc.data, sc.spec, AdhocConfig{});
    CHECK(r.pooled_regions);
    CHECK(r.coefficient_names ==
          std::vector<std::string>{"beta_1", "beta_2", "gamma_1", "region_region1", "region_region2"});
    CHECK(r.fitted.size() == 2 * 48);
    CHECK(r.residual_variance > 0.0);
    CHECK(r.sign_flags.size() == 3);
}

TEST_CASE("sign-violation frequency on the preset scenarios") {
    int violations = 0;
    int fits = 0;
    for (int case_id : {1, 2, 5, 6}) {
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const Scenario sc = generate(ScenarioConfig::preset(case_id, seed));
            violations += fit_adhoc(sc.data, sc.spec, AdhocConfig{}).any_sign_violation() ? 1 : 0;
            ++fits;
        }
    }
    MESSAGE("fits with at least one sign violation: " << violations << " of " << fits);
    CHECK(fits == 40);
}

TEST_CASE("configuration errors") {
    AdhocConfig cfg;
    cfg.alpha_grid = {};
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg.alpha_grid = {1.0};
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = AdhocConfig{};
    const Scenario sc = generate(ScenarioConfig::preset(1, 1));
    ModelSpec wrong = sc.spec;
    wrong.m = 3;
    CHECK_THROWS_AS(fit_adhoc(sc.data, wrong, cfg), DimensionError);
}
