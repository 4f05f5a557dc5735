#include "snmf/specfun.hpp"

#include "snmf/random.hpp"
#include "support.hpp"

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <doctest.h>

#include <cmath>
#include <limits>

using namespace snmf;

TEST_CASE("log_gamma at small integers and one half") {
    CHECK(std::abs(log_gamma(1.0)) <= 1e-14);
    CHECK(std::abs(log_gamma(5.0) - std::log(24.0)) <= 1e-12);
    CHECK(std::abs(log_gamma(0.5) - 0.5 * std::log(M_PI)) <= 1e-12);
}

TEST_CASE("log_gamma agrees with the Boost implementation over [1e-6, 1e6]") {
    Rng rng(11);
    for (int n = 0; n < 2000; ++n) {
        const double x = std::exp(rng.uniform(std::log(1e-6), std::log(1e6)));
        const long double ref = boost::math::lgamma(static_cast<long double>(x));
        const double tol = 1e-12 * std::max(1.0, std::abs(static_cast<double>(ref)));
        CHECK(std::abs(log_gamma(x) - static_cast<double>(ref)) <= tol);
    }
}

TEST_CASE("digamma reference values") {
    CHECK(std::abs(digamma(1.0) + kEulerGamma) <= 1e-10);
    CHECK(std::abs(digamma(0.5) - (-kEulerGamma - 2.0 * std::log(2.0))) <= 1e-10);
}

TEST_CASE("digamma agrees with Boost over [1e-6, 1e6]") {
    Rng rng(12);
    for (int n = 0; n < 2000; ++n) {
        const double x = std::exp(rng.uniform(std::log(1e-6), std::log(1e6)));
        const long double ref = boost::math::digamma(static_cast<long double>(x));
        const double tol = std::max(1e-10, 1e-14 * std::abs(static_cast<double>(ref)));
        CHECK(std::abs(digamma(x) - static_cast<double>(ref)) <= tol);
    }
}

TEST_CASE("digamma recurrence") {
    Rng rng(13);
    for (int n = 0; n < 1000; ++n) {
        const double x = rng.uniform(0.01, 50.0);
        CHECK(std::abs(digamma(x + 1.0) - digamma(x) - 1.0 / x) <= 1e-10 * std::max(1.0, 1.0 / x));
    }
}

TEST_CASE("inverse_digamma") {
    CHECK(std::abs(inverse_digamma(digamma(3.0)) - 3.0) <= 1e-9);
    CHECK(std::abs(inverse_digamma(-0.5772156649) - 1.0) <= 1e-9);

    Rng rng(14);
    for (int n = 0; n < 1000; ++n) {
        const double x = rng.uniform(0.1, 100.0);
        const double y = digamma(x);
        CHECK(std::abs(digamma(inverse_digamma(y)) - y) <= 1e-9);
    }
    double prev = 0.0;
    for (double y = -30.0; y <= 15.0; y += 0.25) {
        const double x = inverse_digamma(y);
        CHECK(x > prev);
        prev = x;
    }
    CHECK_THROWS_AS(inverse_digamma(std::numeric_limits<double>::quiet_NaN()), DomainError);
}

TEST_CASE("bessel_ratio") {
    CHECK(bessel_ratio(0.0, 0.0) == 0.0);
    CHECK(bessel_ratio(7.5, 0.0) == 0.0);

    const long double oracle = testing::bessel_i_series(1.0L, 2.0L, 50) / testing::bessel_i_series(0.0L, 2.0L, 50);
    CHECK(std::abs(bessel_ratio(0.0, 2.0) - static_cast<double>(oracle)) <= 1e-12);
    CHECK(std::abs(bessel_ratio(0.0, 2.0) - 0.697775) <= 1e-6);
    CHECK(bessel_ratio(0.0, 700.0) > 0.999);

    double prev = 0.0;
    for (double z = 0.5; z <= 2000.0; z *= 1.5) {
        const double r = bessel_ratio(3.0, z);
        CHECK(r > prev);
        CHECK(r < 1.0);
        prev = r;
    }

    CHECK_THROWS_AS(bessel_ratio(-1.0, 1.0), DomainError);
    CHECK_THROWS_AS(bessel_ratio(1.0, -1.0), DomainError);
}

TEST_CASE("bessel_ratio against the series oracle at moderate arguments") {
    Rng rng(15);
    for (int n = 0; n < 300; ++n) {
        const double nu = rng.uniform(0.0, 30.0);
        const double z = rng.uniform(0.01, 30.0);
        const long double ref = testing::bessel_i_series(nu + 1.0L, z) / testing::bessel_i_series(nu, z);
        CHECK(std::abs(bessel_ratio(nu, z) / static_cast<double>(ref) - 1.0) <= 1e-10);
    }
}

TEST_CASE("bessel_ratio recurrence holds up to z = 1e6") {
    Rng rng(16);
    for (int n = 0; n < 2000; ++n) {
        const double nu = std::floor(rng.uniform(0.0, 1e4));
        const double z = std::exp(rng.uniform(std::log(1e-3), std::log(1e6)));
        const double lhs = bessel_ratio(nu, z);
        const double rhs = 1.0 / (2.0 * (nu + 1.0) / z + bessel_ratio(nu + 1.0, z));
        REQUIRE(std::isfinite(lhs));
        CHECK(std::abs(lhs - rhs) <= 1e-9 * rhs);
    }
}

TEST_CASE("log_0F1") {
    CHECK(log_0F1(3.5, 0.0) == 0.0);
    CHECK(std::abs(log_0F1(1.0, 1.0) - std::log(2.2795853023360673)) <= 1e-12);

    Rng rng(17);
    for (int n = 0; n < 500; ++n) {
        const double b = std::floor(rng.uniform(1.0, 60.0));
        const double z = rng.uniform(0.0, 100.0);
        const double ref = testing::log_0F1_series(b, z);
        CHECK(std::abs(log_0F1(b, z) - ref) <= 1e-8 * std::max(1.0, std::abs(ref)));
    }

    double prev = -1.0;
    for (double z = 0.0; z <= 1e6; z = z * 2.0 + 0.1) {
        const double v = log_0F1(2.0, z);
        REQUIRE(std::isfinite(v));
        CHECK(v > prev);
        prev = v;
    }
    CHECK(std::isfinite(log_0F1(1.0, 1e12)));

    CHECK_THROWS_AS(log_0F1(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(log_0F1(1.0, -1.0), DomainError);
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(log_gamma(0.0), DomainError);
    CHECK_THROWS_AS(log_gamma(-2.0), DomainError);
    CHECK_THROWS_AS(digamma(0.0), DomainError);
}

TEST_CASE("log_add_exp") {
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(log_add_exp(-inf, -inf) == -inf);
    CHECK(log_add_exp(-inf, 2.0) == 2.0);
    CHECK(std::abs(log_add_exp(1000.0, 1000.0) - (1000.0 + std::log(2.0))) <= 1e-12);
}
