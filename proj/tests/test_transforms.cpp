#include "mmm/errors.hpp"
#include "mmm/transforms.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

using namespace mmm;

TEST_CASE("adstock of a constant series sums the geometric weights") {
    const std::vector<double> ones(8, 1.0);
    const auto c = adstock(ones, {0.5, 5});
    REQUIRE(c.size() == 4);
    for (double v : c) CHECK(v == doctest::Approx(1.9375).epsilon(1e-15));

    const auto dc = adstock_dalpha(ones, {0.5, 5});
    for (double v : dc) CHECK(v == doctest::Approx(3.25).epsilon(1e-15));
}

TEST_CASE("adstock drops the weeks without a full window") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    Eigen::VectorXd x(30);
    for (auto& v : x) v = u(rng);
    const std::vector<double> xs(x.data(), x.data() + x.size());
    for (int ell : {1, 3, 7}) {
        for (double alpha : {0.0, 0.3, 0.9}) {
            const auto c = adstock(xs, {alpha, ell});
            REQUIRE(c.size() == xs.size() - static_cast<std::size_t>(ell) + 1);
            for (std::size_t q = 0; q < c.size(); ++q)
                CHECK(c[q] == doctest::Approx(testing::naive_adstock(x, static_cast<int>(q) + ell - 1, alpha, ell))
                                  .epsilon(1e-14));
        }
    }
}

TEST_CASE("adstock with zero decay returns the input tail") {
    const std::vector<double> x{0.5, 1.5, 2.5, 3.5};
    const auto c = adstock(x, {0.0, 2});
    CHECK(c == std::vector<double>{1.5, 2.5, 3.5});
}

TEST_CASE("adstock derivative agrees with central differences") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    std::vector<double> x(20);
    for (auto& v : x) v = u(rng);
    for (double alpha : {0.05, 0.4, 0.85}) {
        const double h = 1e-6;
        const auto up = adstock(x, {alpha + h, 5});
        const auto down = adstock(x, {alpha - h, 5});
        const auto d = adstock_dalpha(x, {alpha, 5});
        for (std::size_t q = 0; q < d.size(); ++q)
            CHECK(d[q] == doctest::Approx((up[q] - down[q]) / (2 * h)).epsilon(1e-7));
    }
}

TEST_CASE("adstock rejects bad arguments") {
    const std::vector<double> x{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(adstock(x, {0.5, 4}), DimensionError);
    CHECK_THROWS_AS(adstock(x, {1.0, 2}), DomainError);
    CHECK_THROWS_AS(adstock(x, {-0.1, 2}), DomainError);
    CHECK_THROWS_AS(adstock(x, {0.5, 0}), DomainError);
    const std::vector<double> bad{1.0, std::numeric_limits<double>::quiet_NaN(), 1.0};
    CHECK_THROWS_AS(adstock(bad, {0.5, 2}), DomainError);
}

TEST_CASE("Weibull saturation at its scale with unit shape") {
    CHECK(weibull_cdf(0.8, {1.0, 0.8}) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-15));
    CHECK(weibull_cdf(0.8, {1.0, 0.8}) == doctest::Approx(0.6321205588285577));
    CHECK(weibull_cdf(0.0, {0.2, 0.8}) == 0.0);
    CHECK_THROWS_AS(weibull_cdf(-1.0, {1.0, 1.0}), DomainError);
    CHECK_THROWS_AS(weibull_cdf(1.0, {0.0, 1.0}), DomainError);
    CHECK_THROWS_AS(weibull_cdf(1.0, {1.0, -2.0}), DomainError);
}

TEST_CASE("Weibull saturation is increasing and bounded") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.01, 5.0);
    for (int trial = 0; trial < 200; ++trial) {
        const SaturationParams p{u(rng), u(rng)};
        const double a = u(rng);
        const double b = a + u(rng);
        const double sa = weibull_cdf(a, p);
        const double sb = weibull_cdf(b, p);
        CHECK(sa >= 0.0);
        CHECK(sb <= 1.0);
        CHECK(sb >= sa);
    }
}

TEST_CASE("Weibull partials agree with central differences") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    for (int trial = 0; trial < 100; ++trial) {
        const double x = u(rng);
        const SaturationParams p{u(rng), u(rng)};
        const SaturationEval e = weibull_eval(x, p);
        const double h = 1e-6;
        CHECK(e.value == doctest::Approx(weibull_cdf(x, p)).epsilon(1e-14));
        CHECK(e.d_x == doctest::Approx((weibull_cdf(x + h, p) - weibull_cdf(x - h, p)) / (2 * h)).epsilon(1e-6));
        CHECK(e.d_k == doctest::Approx((weibull_cdf(x, {p.k + h, p.lambda}) - weibull_cdf(x, {p.k - h, p.lambda})) /
                                       (2 * h))
                           .epsilon(1e-6));
        CHECK(e.d_lambda ==
              doctest::Approx((weibull_cdf(x, {p.k, p.lambda + h}) - weibull_cdf(x, {p.k, p.lambda - h})) / (2 * h))
                  .epsilon(1e-6));
    }
}

TEST_CASE("Weibull evaluation stays finite far into saturation") {
    const SaturationEval e = weibull_eval(1e6, {5.0, 0.01});
    CHECK(e.value == 1.0);
    CHECK(std::isfinite(e.d_x));
    CHECK(std::isfinite(e.d_k));
    CHECK(std::isfinite(e.d_lambda));
    const SaturationEval zero = weibull_eval(0.0, {0.2, 0.8});
    CHECK(zero.value == 0.0);
    CHECK(zero.d_k == 0.0);
    CHECK(zero.d_lambda == 0.0);
}

TEST_CASE("response scales the saturated carryover") {
    const std::vector<double> x{1.0, 0.0, 2.0, 1.0, 0.5, 1.5};
    const AdstockParams a{0.4, 3};
    const SaturationParams s{0.7, 1.2};
    const auto r = response(x, 2.5, a, s);
    const auto c = adstock(x, a);
    REQUIRE(r.size() == c.size());
    for (std::size_t q = 0; q < r.size(); ++q) CHECK(r[q] == doctest::Approx(2.5 * weibull_cdf(c[q], s)));
}
