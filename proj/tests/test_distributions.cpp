#include "mmm/distributions.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace mmm;

TEST_CASE("normal cdf reference values") {
    CHECK(std_normal_cdf(0.0) == 0.5);
    CHECK(std_normal_cdf(1.96) == doctest::Approx(0.9750021048517796).epsilon(1e-14));
    CHECK(std_normal_cdf(-1.96) == doctest::Approx(1.0 - 0.9750021048517796).epsilon(1e-12));
}

TEST_CASE("log normal cdf deep in the lower tail") {
    // high-precision reference values
    CHECK(log_std_normal_cdf(-10.0) == doctest::Approx(-53.23128515051247).epsilon(1e-13));
    CHECK(log_std_normal_cdf(-35.0) == doctest::Approx(-616.9751012619225).epsilon(1e-13));
    CHECK(log_std_normal_cdf(-40.0) == doctest::Approx(-804.6084420137538).epsilon(1e-13));
    // continuous across the switch to the asymptotic series
    const double a = log_std_normal_cdf(-30.0 + 1e-9);
    const double b = log_std_normal_cdf(-30.0 - 1e-9);
    CHECK(std::abs(a - b) < 1e-6);
    CHECK(log_std_normal_cdf(3.0) == doctest::Approx(std::log(std_normal_cdf(3.0))).epsilon(1e-14));
}

TEST_CASE("inverse Mills ratio") {
    CHECK(inverse_mills_ratio(0.0) == doctest::Approx(std::sqrt(2.0 / M_PI)).epsilon(1e-14));
    // for very negative x the ratio tends to -x
    CHECK(inverse_mills_ratio(-50.0) == doctest::Approx(50.0).epsilon(1e-3));
}

TEST_CASE("truncated normal density integrates to one") {
    for (auto [mean, sd] : {std::pair{1.0, 0.5}, std::pair{-0.5, 1.0}, std::pair{0.0, 2.0}, std::pair{3.0, 0.3}}) {
        // composite Simpson on [0, mean + 14 sd]
        const double hi = std::max(mean, 0.0) + 14.0 * sd;
        const int n = 200000;
        const double h = hi / n;
        double s = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            s += w * std::exp(log_trunc_normal(i * h, mean, sd));
        }
        CHECK(std::abs(s * h / 3.0 - 1.0) < 1e-8);
    }
}

TEST_CASE("truncated normal is the normal density times the truncation factor") {
    for (double mean : {-2.0, -0.3, 0.0, 0.7, 4.0}) {
        for (double sd : {0.2, 1.0, 3.0}) {
            for (double v : {0.0, 0.1, 1.5, 8.0}) {
                const double lhs = log_trunc_normal(v, mean, sd) - log_normal_pdf(v, mean, sd);
                CHECK(lhs == doctest::Approx(log_truncation_factor(mean, sd)).epsilon(1e-12));
            }
        }
    }
    CHECK(log_trunc_normal(-1e-12, 1.0, 1.0) == -std::numeric_limits<double>::infinity());
    // factor is -log(1 - Phi(-mean/sd))
    CHECK(log_truncation_factor(0.0, 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("truncation factor gradient agrees with central differences") {
    for (double mean : {-3.0, -0.5, 0.2, 2.0}) {
        for (double sd : {0.3, 1.0, 2.5}) {
            const double h = 1e-6;
            const TruncationFactorGrad g = log_truncation_factor_grad(mean, sd);
            CHECK(g.d_mean == doctest::Approx((log_truncation_factor(mean + h, sd) - log_truncation_factor(mean - h, sd)) /
                                              (2 * h))
                                  .epsilon(1e-6));
            CHECK(g.d_sd == doctest::Approx((log_truncation_factor(mean, sd + h) - log_truncation_factor(mean, sd - h)) /
                                            (2 * h))
                                .epsilon(1e-6));
        }
    }
}

TEST_CASE("gamma and inverse-gamma densities") {
    CHECK(log_gamma_pdf(1.0, 2.0, 1.0) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(log_inv_gamma_pdf(1.0, 1.0, 1.0) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(log_gamma_pdf(0.0, 0.5, 1.0) == -std::numeric_limits<double>::infinity());
    CHECK(log_inv_gamma_pdf(-1.0, 1.0, 1.0) == -std::numeric_limits<double>::infinity());
    // Gamma(3, 2) against its closed form 4 v^2 e^{-2v}
    for (double v : {0.1, 0.7, 2.0}) CHECK(std::exp(log_gamma_pdf(v, 3.0, 2.0)) == doctest::Approx(4 * v * v * std::exp(-2 * v)));
    CHECK(log_normal_pdf(0.0, 0.0, 1.0) == doctest::Approx(-0.5 * std::log(2 * M_PI)));
}
