#include "mmm/errors.hpp"
#include "mmm/lbfgsb.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace mmm;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

double rosenbrock(const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    const double a = 1.0 - x(0);
    const double b = x(1) - x(0) * x(0);
    g.resize(2);
    g(0) = -2.0 * a - 400.0 * x(0) * b;
    g(1) = 200.0 * b;
    return a * a + 100.0 * b * b;
}

}  // namespace

TEST_CASE("unconstrained Rosenbrock") {
    const Eigen::VectorXd lo = Eigen::VectorXd::Constant(2, -kInf);
    const Eigen::VectorXd hi = Eigen::VectorXd::Constant(2, kInf);
    LbfgsbOptions opt;
    opt.gtol = 1e-8;
    const SolverResult r = minimize_box(rosenbrock, Eigen::Vector2d(-1.2, 1.0), lo, hi, opt);
    CHECK(r.status == SolverStatus::Converged);
    CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.x(1) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("separable quadratic lands on the projection of its minimiser") {
    Eigen::VectorXd c(5);
    c << -1.0, 0.3, 2.0, 0.99, -0.2;
    Eigen::VectorXd w(5);
    w << 1.0, 10.0, 0.5, 3.0, 100.0;
    const BoxObjective f = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        g = (w.array() * (x - c).array()).matrix();
        return 0.5 * (w.array() * (x - c).array().square()).sum();
    };
    const Eigen::VectorXd lo = Eigen::VectorXd::Zero(5);
    const Eigen::VectorXd hi = Eigen::VectorXd::Ones(5);
    const SolverResult r = minimize_box(f, Eigen::VectorXd::Constant(5, 0.5), lo, hi);
    CHECK(r.status == SolverStatus::Converged);
    const Eigen::VectorXd expected = c.cwiseMax(lo).cwiseMin(hi);
    CHECK((r.x - expected).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("iterates stay in the box and the objective never increases") {
    const Eigen::VectorXd lo = Eigen::Vector2d(-0.5, 0.2);
    const Eigen::VectorXd hi = Eigen::Vector2d(0.8, 3.0);
    int outside = 0;
    const BoxObjective f = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        if ((x.array() < lo.array()).any() || (x.array() > hi.array()).any()) ++outside;
        return rosenbrock(x, g);
    };
    const SolverResult r = minimize_box(f, Eigen::Vector2d(5.0, -5.0), lo, hi);
    CHECK(outside == 0);
    for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] <= r.trace[i - 1]);
    CHECK(r.projected_gradient_norm <= 1e-6);
    CHECK(r.x(0) == doctest::Approx(0.8).epsilon(1e-6));
}

TEST_CASE("coordinates with equal bounds stay fixed") {
    const Eigen::VectorXd lo = Eigen::Vector2d(0.3, -kInf);
    const Eigen::VectorXd hi = Eigen::Vector2d(0.3, kInf);
    const SolverResult r = minimize_box(rosenbrock, Eigen::Vector2d(0.0, 0.0), lo, hi);
    CHECK(r.x(0) == 0.3);
    CHECK(r.x(1) == doctest::Approx(0.09).epsilon(1e-6));
}

TEST_CASE("invalid starts and bad bounds") {
    const BoxObjective bad = [](const Eigen::VectorXd&, Eigen::VectorXd& g) {
        g.setZero();
        return kInf;
    };
    const Eigen::VectorXd lo = Eigen::VectorXd::Zero(2);
    const Eigen::VectorXd hi = Eigen::VectorXd::Ones(2);
    const SolverResult r = minimize_box(bad, Eigen::VectorXd::Zero(2), lo, hi);
    CHECK(r.status == SolverStatus::InvalidStart);
    CHECK(r.iterations == 0);
    CHECK_THROWS_AS(minimize_box(rosenbrock, Eigen::VectorXd::Zero(2), hi, lo), DomainError);
    CHECK_THROWS_AS(minimize_box(rosenbrock, Eigen::VectorXd::Zero(3), lo, hi), DimensionError);
    CHECK(to_string(SolverStatus::LineSearchFailed) == "line_search_failed");
}

TEST_CASE("iteration cap is reported") {
    LbfgsbOptions opt;
    opt.max_iterations = 3;
    const Eigen::VectorXd inf = Eigen::VectorXd::Constant(2, kInf);
    const SolverResult r = minimize_box(rosenbrock, Eigen::Vector2d(-1.2, 1.0), -inf, inf, opt);
    CHECK(r.status == SolverStatus::MaxIterations);
    CHECK(r.iterations == 3);
    CHECK(r.trace.size() == 4);
}
