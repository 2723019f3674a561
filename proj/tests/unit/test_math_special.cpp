#include <doctest.h>

#include <cmath>
#include <initializer_list>

#include "math_special.hpp"

using namespace rss_sentry;

TEST_CASE("erfcx matches the direct product in the overlap region") {
    for (double x = -5.0; x <= 25.0; x += 0.37) {
        const double direct = std::exp(x * x) * std::erfc(x);
        CHECK(erfcx(x) == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("erfcx branches agree with high-precision anchors at the switch") {
    // Reference values computed with 40-digit arithmetic.
    CHECK(erfcx(19.999999) == doctest::Approx(2.81743501462688416e-02).epsilon(1e-13));
    CHECK(erfcx(20.000001) == doctest::Approx(2.81743473358339359e-02).epsilon(1e-13));
    CHECK(erfcx(26.0) == doctest::Approx(2.16835848505629071e-02).epsilon(1e-13));
}

TEST_CASE("log_erfcx agrees with log(erfcx) where both are finite") {
    for (double x : {-20.0, -5.0, -1.0, 0.0, 1.0, 5.0, 30.0}) {
        CHECK(log_erfcx(x) == doctest::Approx(std::log(erfcx(x))).epsilon(1e-12));
    }
    // Far-negative arguments where erfcx itself overflows.
    CHECK(log_erfcx(-30.0) == doctest::Approx(900.0 + std::log(2.0)).epsilon(1e-10));
}

TEST_CASE("normal_cdf reference values") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    // Phi(1), standard normal CDF oracle.
    CHECK(normal_cdf(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-14));
    CHECK(normal_cdf(10.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(normal_cdf(-1.0) + normal_cdf(1.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("log_normal_cdf is stable in the deep lower tail") {
    for (double z : {-0.5, -1.0, -3.0, -8.0}) {
        CHECK(log_normal_cdf(z) == doctest::Approx(std::log(normal_cdf(z))).epsilon(1e-12));
    }
    // Quadratic decay with the right constant.
    const double z = -40.0;
    const double expected = -0.5 * z * z - std::log(-z) - 0.5 * std::log(2.0 * 3.141592653589793);
    CHECK(log_normal_cdf(z) == doctest::Approx(expected).epsilon(1e-3));
}

TEST_CASE("mills_ratio matches phi/Phi at moderate arguments and stays finite") {
    for (double z = -8.0; z <= 8.0; z += 0.31) {
        const double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * 3.141592653589793);
        CHECK(mills_ratio(z) == doctest::Approx(phi / normal_cdf(z)).epsilon(1e-11));
    }
    CHECK(mills_ratio(-50.0) == doctest::Approx(50.02).epsilon(1e-3));
    CHECK(mills_ratio(50.0) >= 0.0);
    CHECK(std::isfinite(mills_ratio(50.0)));
}

TEST_CASE("one-bit Fisher weight: quotient form vs stable form") {
    // Naive evaluation exp(-u^2)/(1 - erf^2) is healthy for |u| <= 5.
    for (double u = 0.05; u <= 5.0; u += 0.173) {
        const double naive =
            std::exp(-u * u) / (1.0 - std::erf(u / std::sqrt(2.0)) * std::erf(u / std::sqrt(2.0)));
        CHECK(one_bit_fisher_weight(u) == doctest::Approx(naive).epsilon(1e-11));
        CHECK(one_bit_fisher_weight(-u) == doctest::Approx(naive).epsilon(1e-11));
    }
    CHECK(one_bit_fisher_weight(0.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("one-bit Fisher weight decays without NaN into deep saturation") {
    double prev = one_bit_fisher_weight(6.0);
    for (double u = 8.0; u <= 40.0; u += 2.0) {
        const double w = one_bit_fisher_weight(u);
        CHECK(std::isfinite(w));
        CHECK(w >= 0.0);
        CHECK(w <= prev);
        prev = w;
    }
    CHECK(one_bit_fisher_weight(30.0) > 0.0);  // ~1e-196, still normal
}

TEST_CASE("normal_quantile inverts normal_cdf") {
    for (double p : {1e-10, 1e-4, 0.025, 0.3, 0.5, 0.84134, 0.999, 1.0 - 1e-10}) {
        CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-9));
    }
}
