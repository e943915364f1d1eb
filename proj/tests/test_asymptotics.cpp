#include "doctest.h"
#include "oracles.hpp"

#include "cpm/asymptotics.hpp"
#include "cpm/constants.hpp"
#include "cpm/errors.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace cpm;

namespace {
const double kPi = std::numbers::pi;

std::vector<EnsembleSpec> beta2_families(int N) {
    return {EnsembleSpec::gaussian(2.0, N), EnsembleSpec::laguerre_fixed(2.0, N, 0.7),
            EnsembleSpec::laguerre_scaled(2.0, N, 1.3), EnsembleSpec::jacobi_fixed(2.0, N, 0.6, 1.3),
            EnsembleSpec::jacobi_scaled(2.0, N, 1.0, 0.5)};
}

std::vector<double> interior_points(const EnsembleSpec& s, int k) {
    const SpectralSupport sp = limiting_support(s);
    std::vector<double> v;
    for (int i = 1; i <= k; ++i) v.push_back(sp.lower + sp.width() * i / (k + 1.0));
    return v;
}
} // namespace

TEST_CASE("error_exponent examples") {
    CHECK(error_exponent(2.0) == 1.0);
    CHECK(error_exponent(4.0) == 0.5);
    CHECK(error_exponent(1.0) == 1.0);
}

TEST_CASE("Gaussian beta=2 p=1 lambda=0 prediction") {
    for (int N : {1, 10, 100, 1000}) {
        const Prediction pr = predict(EnsembleSpec::gaussian(2.0, N), {0.0, 1});
        CHECK(pr.log_value == doctest::Approx(std::log(2.0 * N) - N * (1 + std::log(4.0))).epsilon(1e-13));
        CHECK(pr.error_exponent == 1.0);
    }
}

TEST_CASE("JacobiScaled at alpha=0 coincides with JacobiFixed at a=0") {
    for (double b : {1.0, 2.0, 4.0, 0.7})
        for (int p = 1; p <= 3; ++p)
            for (double l : {0.1, 0.37, 0.5, 0.9}) {
                const double a = predict(EnsembleSpec::jacobi_scaled(b, 50, 0, 0), {l, p}).log_value;
                const double c = predict(EnsembleSpec::jacobi_fixed(b, 50, 0, 0), {l, p}).log_value;
                CHECK(std::fabs(a - c) < 1e-10);
            }
}

TEST_CASE("predict rejects points outside the support") {
    CHECK_THROWS_AS(predict(EnsembleSpec::gaussian(2.0, 10), {1.5, 1}), SupportError);
    CHECK_THROWS_AS(predict(EnsembleSpec::gaussian(2.0, 10), {1.0, 1}), SupportError);
    CHECK_THROWS_AS(predict(EnsembleSpec::laguerre_fixed(2.0, 10, 0.0), {0.0, 1}), SupportError);
    CHECK_THROWS_AS(predict(EnsembleSpec::laguerre_scaled(2.0, 10, 3.0), {0.5, 1}), SupportError);
    CHECK_THROWS_AS(predict(EnsembleSpec::jacobi_scaled(2.0, 10, 4.0, 4.0), {0.9, 1}), SupportError);
    CHECK_THROWS_AS(predict(EnsembleSpec::laguerre_fixed(2.0, 10, -1.5), {0.5, 1}), DomainError);
}

TEST_CASE("g2_exponent examples") {
    CHECK(g2_exponent(0, 0, 0.3) == doctest::Approx(-4 * std::log(2.0)));
    CHECK(g2_exponent(0, 0, 0.5) == doctest::Approx(-4 * std::log(2.0)));
    CHECK(g2_exponent(1, 1, 0.5) == doctest::Approx(3 * std::log(3.0) - 10 * std::log(2.0)));
}

TEST_CASE("int1_oracle examples and quadrature") {
    // constant integrand ln b integrates to pi ln b
    CHECK(int1_oracle(0, 2) == doctest::Approx(kPi * std::log(2.0)));
    CHECK(int1_oracle(0, 5) == doctest::Approx(kPi * std::log(5.0)));
    CHECK(int1_oracle(1, 2) == doctest::Approx(kPi * std::log((2 + std::sqrt(3.0)) / 2)));
    for (auto [a, b] : {std::pair{1.0, 2.0}, std::pair{-0.7, 0.9}, std::pair{3.0, 3.5}}) {
        // substitute x = cos(t) to remove the endpoint singularity
        const double q = oracle::integrate([a = a, b = b](double t) { return std::log(a * std::cos(t) + b); }, 0.0, kPi);
        CHECK(int1_oracle(a, b) == doctest::Approx(q).epsilon(1e-10));
    }
    CHECK_THROWS_AS(int1_oracle(2, 1), DomainError);
}

TEST_CASE("cg21 Gaussian p=1 lambda=0 coefficients") {
    const Cg21Coefficients c = cg21_coefficients(EnsembleSpec::gaussian(2.0, 10), {0.0, 1});
    CHECK(c.C1 == doctest::Approx(-2 * std::log(2.0) - 1));
    CHECK(c.C2 == 1.0);
    CHECK(c.C3 == doctest::Approx(std::log(2.0)));
    for (int p = 1; p <= 4; ++p) CHECK(cg21_coefficients(EnsembleSpec::gaussian(2.0, 10), {0.4, p}).C2 == p * p);
    CHECK_THROWS_AS(cg21_coefficients(EnsembleSpec::gaussian(4.0, 10), {0.0, 1}), UnsupportedError);
}

TEST_CASE("cg21 coefficients reproduce predict at beta=2 for every family") {
    for (int N : {7, 64, 500})
        for (const EnsembleSpec& s : beta2_families(N))
            for (double l : interior_points(s, 5))
                for (int p : {1, 2}) {
                    const double a = predict(s, {l, p}).log_value;
                    const double b = cg21_coefficients(s, {l, p}).log_value(N);
                    CHECK_MESSAGE(std::fabs(a - b) < 1e-8, family_name(s.family), " lambda=", l, " p=", p);
                }
}

TEST_CASE("LaguerreScaled alpha=0 cg21 agrees with predict") {
    for (double l : {0.3, 1.0, 2.0, 3.5}) {
        const EnsembleSpec s = EnsembleSpec::laguerre_scaled(2.0, 40, 0.0);
        CHECK(std::fabs(predict(s, {l, 1}).log_value - cg21_coefficients(s, {l, 1}).log_value(40)) < 1e-8);
    }
}

TEST_CASE("scaled families are affine in N") {
    for (double b : {1.0, 2.0, 4.0})
        for (const EnsembleSpec& base : {EnsembleSpec::gaussian(b, 1), EnsembleSpec::laguerre_scaled(b, 1, 1.3),
                                         EnsembleSpec::jacobi_scaled(b, 1, 1.0, 0.5)})
            for (double l : interior_points(base, 3))
                for (int p : {1, 2}) {
                    auto d = [&](int N) {
                        // remove the (2p^2/beta) ln N term, which is the only non-affine piece
                        auto f = [&](int n) {
                            return predict(base.with_N(n), {l, p}).log_value - 2.0 * p * p / b * std::log(double(n));
                        };
                        return f(N + 1) - f(N);
                    };
                    CHECK(std::fabs(d(10) - d(300)) < 1e-12 * std::max(1.0, std::fabs(d(10))) * 100);
                }
}

TEST_CASE("LaguerreScaled at alpha=0 is the rescaled Marchenko-Pastur predictor") {
    // x_scaled = 4 x_fixed maps exp(-beta N x / 2) onto exp(-2 beta N x)
    for (double b : {1.0, 2.0, 4.0})
        for (int N : {5, 64, 256})
            for (int p : {1, 2})
                for (double l : {0.3, 1.5, 3.7}) {
                    const double s = predict(EnsembleSpec::laguerre_scaled(b, N, 0.0), {l, p}).log_value;
                    const double f = predict(EnsembleSpec::laguerre_fixed(b, N, 0.0), {l / 4, p}).log_value +
                                     2.0 * p * N * std::log(4.0);
                    CHECK(std::fabs(s - f) < 1e-9);
                }
}

TEST_CASE("LaguerreScaled is continuous as alpha -> 0") {
    // f(alpha) - f(0) = J + c alpha + O(alpha^2 ln alpha); the extrapolated jump J must vanish
    for (double b : {1.0, 2.0, 4.0})
        for (double l : {0.5, 1.5, 3.0}) {
            auto f = [&](double al) { return predict(EnsembleSpec::laguerre_scaled(b, 64, al), {l, 2}).log_value; };
            const double f0 = f(0.0), d1 = f(1e-8) - f0, d2 = f(2e-8) - f0;
            CHECK(std::fabs(2.0 * d1 - d2) < 1e-9);
        }
}

TEST_CASE("A enters every family identically") {
    for (double b : {1.0, 2.0, 4.0})
        for (int p : {1, 2, 3}) {
            const double la = a_beta_p(b, p).log_abs;
            const EnsembleSpec g = EnsembleSpec::gaussian(b, 32);
            const EnsembleSpec j = EnsembleSpec::jacobi_fixed(b, 32, 0.0, 0.0);
            const double rg = predict(g, {0.0, p}).log_value - la;
            const double rj = predict(j, {0.5, p}).log_value - la;
            // family-specific remainders written out independently
            const double eg = p * (2 - b) / b * std::log(2.0) + 2 * p * p / b * std::log(2.0 * 32) + 2 * 32 * p * (-0.5 - std::log(2.0));
            const double ej = p * (2 - b) / b * std::log(0.5) + 2 * p * p / b * std::log(32.0) - 4 * p * 32 * std::log(2.0);
            CHECK(rg == doctest::Approx(eg).epsilon(1e-12));
            CHECK(rj == doctest::Approx(ej).epsilon(1e-12));
        }
}
