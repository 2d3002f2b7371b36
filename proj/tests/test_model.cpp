#include "mmm/errors.hpp"
#include "mmm/model.hpp"
#include "mmm/simulate.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <random>

using namespace mmm;

namespace {

ModelSpec base_spec() {
    ModelSpec s;
    s.m = 2;
    s.n = 2;
    s.sign_constrained_beta = {0, 1};
    s.sign_constrained_gamma = {0};
    return s;
}

ModelSpec hier_spec() {
    ModelSpec s = base_spec();
    s.g = 2;
    s.hierarchical = true;
    return s;
}

}  // namespace

TEST_CASE("flat layout sizes") {
    CHECK(ParameterLayout(base_spec()).size() == 11);
    CHECK(ParameterLayout(hier_spec()).size() == 23);
}

TEST_CASE("flat layout names follow the packing order") {
    const auto names = ParameterLayout(hier_spec()).names();
    const std::vector<std::string> expected{
        "alpha_1",   "alpha_2",      "k_1",          "k_2",          "lambda_1",     "lambda_2",
        "beta_1",    "beta_2",       "gamma_1",      "gamma_2",      "eta2_1",       "eta2_2",
        "xi2_1",     "xi2_2",        "beta_r_1_1",   "beta_r_2_1",   "beta_r_1_2",   "beta_r_2_2",
        "gamma_r_1_1", "gamma_r_2_1", "gamma_r_1_2", "gamma_r_2_2", "sigma2"};
    CHECK(names == expected);
}

TEST_CASE("layout metadata") {
    const ModelSpec spec = base_spec();
    const ParameterLayout layout(spec);
    CHECK(layout[layout.alpha(0)].reparam == Reparam::Logit);
    CHECK(layout[layout.k(1)].reparam == Reparam::Log);
    CHECK(layout[layout.lambda(0)].reparam == Reparam::Log);
    CHECK(layout[layout.sigma2()].reparam == Reparam::Identity);
    CHECK(layout[layout.beta(0)].lower == 0.0);
    CHECK(layout[layout.gamma(0)].lower == 0.0);
    CHECK(std::isinf(layout[layout.gamma(1)].lower));

    ModelSpec reflected = spec;
    reflected.log_scale_transforms = false;
    const ParameterLayout plain(reflected);
    CHECK(plain[plain.k(0)].reparam == Reparam::Identity);
    CHECK(plain[plain.lambda(1)].reparam == Reparam::Identity);
}

TEST_CASE("pack and unpack are inverse") {
    std::mt19937_64 rng(4);
    for (const ModelSpec& spec : {base_spec(), hier_spec()}) {
        for (int trial = 0; trial < 10; ++trial) {
            const Eigen::VectorXd flat = testing::random_feasible_point(spec, rng);
            CHECK(pack(unpack(flat, spec), spec) == flat);
        }
    }
}

TEST_CASE("pack and unpack reject mismatched shapes") {
    const ModelSpec spec = base_spec();
    CHECK_THROWS_AS(unpack(Eigen::VectorXd::Zero(10), spec), StructuralError);
    Parameters p = Parameters::zeros(spec);
    p.beta.resize(3);
    CHECK_THROWS_AS(pack(p, spec), StructuralError);
}

TEST_CASE("feasibility names the violated parameter") {
    const ModelSpec spec = hier_spec();
    std::mt19937_64 rng(9);
    Parameters p = unpack(testing::random_feasible_point(spec, rng), spec);
    CHECK(is_feasible(p, spec));

    Parameters bad = p;
    bad.beta_r(1, 0) = -0.1;
    CHECK_FALSE(is_feasible(bad, spec));
    try {
        check_feasible(bad, spec);
        FAIL("expected DomainError");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("beta_r_2_1") != std::string::npos);
    }

    bad = p;
    bad.alpha(0) = 1.0;
    CHECK_THROWS_AS(check_feasible(bad, spec), DomainError);
    bad = p;
    bad.sigma2 = 0.0;
    CHECK_THROWS_AS(check_feasible(bad, spec), DomainError);
    bad = p;
    bad.gamma(1) = -5.0;  // unconstrained
    CHECK(is_feasible(bad, spec));
}

TEST_CASE("spec validation") {
    ModelSpec s = base_spec();
    s.sign_constrained_beta = {0, 2};
    CHECK_THROWS_AS(s.validate(), StructuralError);
    s = base_spec();
    s.sign_constrained_gamma = {1, 1};
    CHECK_THROWS_AS(s.validate(), StructuralError);
    s = base_spec();
    s.hierarchical = true;
    CHECK_THROWS_AS(s.validate(), StructuralError);
    s = base_spec();
    s.priors.shape.rate = 0.0;
    CHECK_THROWS_AS(s.validate(), DomainError);
    CHECK(base_spec().fitted_weeks(52) == 48);
}

TEST_CASE("predict matches a brute-force evaluation") {
    std::mt19937_64 rng(21);
    for (int case_id : {1, 5}) {
        const Scenario sc = generate(ScenarioConfig::preset(case_id, 3));
        for (int trial = 0; trial < 5; ++trial) {
            const Parameters p = unpack(testing::random_feasible_point(sc.spec, rng), sc.spec);
            const Eigen::MatrixXd got = predict(p, sc.data, sc.spec);
            const Eigen::MatrixXd want = testing::naive_predict(p, sc.data, sc.spec);
            REQUIRE(got.rows() == 48);
            CHECK((got - want).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("fixed-effect prediction uses the fixed means") {
    const Scenario sc = generate(ScenarioConfig::preset(5, 2));
    Parameters p = sc.truth;
    p.beta_r.setConstant(3.0);
    p.gamma_r.setConstant(2.0);
    Parameters fixed_only = p;
    fixed_only.beta_r.colwise() = p.beta;
    fixed_only.gamma_r.colwise() = p.gamma;
    const Eigen::MatrixXd a = predict(p, sc.data, sc.spec, Effects::Fixed);
    const Eigen::MatrixXd b = predict(fixed_only, sc.data, sc.spec, Effects::Conditional);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("panel validation") {
    const Scenario sc = generate(ScenarioConfig::preset(5, 2));
    PanelDataset d = sc.data;
    d.regions[1].x(3, 0) = -1.0;
    CHECK_THROWS_AS(d.validate(), DomainError);
    d = sc.data;
    d.regions[1].y.conservativeResize(40);
    CHECK_THROWS_AS(d.validate(), DimensionError);
    ModelSpec wrong = sc.spec;
    wrong.m = 3;
    wrong.sign_constrained_beta = {0, 1, 2};
    CHECK_THROWS_AS(sc.data.validate_against(wrong), DimensionError);
}
