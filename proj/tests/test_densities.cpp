#include "doctest.h"
#include "oracles.hpp"

#include "cpm/densities.hpp"

#include <cmath>
#include <numbers>

using namespace cpm;

namespace {
const double kPi = std::numbers::pi;
}

TEST_CASE("rho_wigner examples") {
    CHECK(rho_wigner(0.0) == doctest::Approx(2.0 / kPi));
    CHECK(rho_wigner(1.0) == 0.0);
    CHECK(rho_wigner(-1.0) == 0.0);
    CHECK(rho_wigner(0.6) == doctest::Approx(2.0 / kPi * 0.8));
    CHECK(rho_wigner(1.5) == 0.0);
}

TEST_CASE("rho_mp examples") {
    CHECK(rho_mp(0.5) == doctest::Approx(2.0 / kPi));
    CHECK(rho_mp(1.0) == 0.0);
    CHECK(oracle::integrate(rho_mp, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("rho_jacobi examples") {
    CHECK(rho_jacobi(0.5) == doctest::Approx(2.0 / kPi));
    CHECK(rho_jacobi(0.25) == doctest::Approx(4.0 / (kPi * std::sqrt(3.0))));
    CHECK(oracle::integrate(rho_jacobi, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("rho_laguerre_scaled examples") {
    const SpectralSupport s0 = laguerre_scaled_support(0.0);
    CHECK(s0.lower == doctest::Approx(0.0));
    CHECK(s0.upper == doctest::Approx(4.0));
    for (double l = 0.05; l < 1.0; l += 0.05) {
        CHECK(rho_laguerre_scaled(l * 4, 0.0) == doctest::Approx((1 / (2 * kPi)) * std::sqrt((4 - 4 * l) / (4 * l))));
        CHECK(std::fabs(4.0 * rho_laguerre_scaled(4.0 * l, 0.0) - rho_mp(l)) < 1e-12);
    }
    const SpectralSupport s3 = laguerre_scaled_support(3.0);
    CHECK(s3.lower == doctest::Approx(1.0));
    CHECK(s3.upper == doctest::Approx(9.0));
    CHECK(rho_laguerre_scaled(0.5, 3.0) == 0.0);
    CHECK(rho_laguerre_scaled(9.5, 3.0) == 0.0);
}

TEST_CASE("rho_jacobi_scaled examples") {
    const SpectralSupport s0 = jacobi_scaled_support(0.0, 0.0);
    CHECK(s0.lower == doctest::Approx(0.0));
    CHECK(s0.upper == doctest::Approx(1.0));
    for (double l = 0.05; l < 1.0; l += 0.05) CHECK(std::fabs(rho_jacobi_scaled(l, 0.0, 0.0) - rho_jacobi(l)) < 1e-12);
    const SpectralSupport s4 = jacobi_scaled_support(4.0, 4.0);
    CHECK(s4.lower == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(s4.upper == doctest::Approx(0.8).epsilon(1e-14));
    const SpectralSupport s12 = jacobi_scaled_support(1.0, 2.0);
    const double m = oracle::integrate([](double x) { return rho_jacobi_scaled(x, 1.0, 2.0); }, s12.lower, s12.upper);
    CHECK(m == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("all densities integrate to one") {
    CHECK(oracle::integrate(rho_wigner, -1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(oracle::integrate(rho_mp, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(oracle::integrate(rho_jacobi, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-6));
    for (double al : {0.0, 0.5, 3.0}) {
        const SpectralSupport s = laguerre_scaled_support(al);
        CHECK(oracle::integrate([al](double x) { return rho_laguerre_scaled(x, al); }, s.lower, s.upper) ==
              doctest::Approx(1.0).epsilon(1e-6));
    }
    for (auto [a1, a2] : {std::pair{0.5, 0.5}, std::pair{1.0, 0.5}, std::pair{3.0, 0.2}}) {
        const SpectralSupport s = jacobi_scaled_support(a1, a2);
        CHECK(oracle::integrate([a1 = a1, a2 = a2](double x) { return rho_jacobi_scaled(x, a1, a2); }, s.lower, s.upper) ==
              doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("support endpoints are zeros of the radicand") {
    for (double al : {0.0, 0.3, 2.0, 7.0}) {
        const SpectralSupport s = laguerre_scaled_support(al);
        for (double x : {s.lower, s.upper}) CHECK(std::fabs(4 * x - (x - al) * (x - al)) < 1e-10);
    }
    for (auto [a1, a2] : {std::pair{0.5, 0.5}, std::pair{1.0, 0.5}, std::pair{3.0, 0.2}, std::pair{0.0, 2.0}}) {
        const SpectralSupport s = jacobi_scaled_support(a1, a2);
        // (c1, c2) satisfy the linear and product relations of the endpoint system
        const double sum2 = (a1 + a2 + 2) * (a1 + a2 + 2);
        CHECK(std::fabs(s.lower + s.upper - (1 + (a1 * a1 - a2 * a2) / sum2)) < 1e-10);
        CHECK(std::fabs((2 * s.lower - 1) * (2 * s.upper - 1) - (2 * (a1 * a1 + a2 * a2) / sum2 - 1)) < 1e-10);
        CHECK(s.lower >= 0.0);
        CHECK(s.upper <= 1.0);
    }
}
