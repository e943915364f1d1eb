#include "doctest.h"
#include "oracles.hpp"

#include "cpm/asymptotics.hpp"
#include "cpm/densities.hpp"
#include "cpm/dualexact.hpp"
#include "cpm/errors.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace cpm;

namespace {
const double kPi = std::numbers::pi;

std::vector<EnsembleSpec> gate_families(double beta, int N) {
    return {EnsembleSpec::gaussian(beta, N), EnsembleSpec::laguerre_fixed(beta, N, 0.7),
            EnsembleSpec::laguerre_scaled(beta, N, 1.0), EnsembleSpec::jacobi_fixed(beta, N, 0.6, 1.3),
            EnsembleSpec::jacobi_scaled(beta, N, 1.0, 0.5)};
}

const std::vector<std::vector<double>> kGateLambdas = {
    {-0.4, 0.1, 0.6}, {0.2, 0.5, 0.8}, {0.8, 2.5, 4.5}, {0.25, 0.5, 0.7}, {0.2, 0.45, 0.8}};

double rel(double a, double b) { return std::fabs(a / b - 1.0); }

// 2-D tanh-sinh over the ordered region x1 < x2 of a symmetric integrand on (lo, hi).
double ordered_2d(const std::function<double(double, double)>& f, double lo, double hi) {
    return oracle::integrate([&](double x1) { return oracle::integrate([&](double x2) { return f(x1, x2); }, x1, hi); },
                             lo, hi);
}
} // namespace

TEST_CASE("saddle examples") {
    SUBCASE("Gaussian lambda=0") {
        const SaddleData s = saddle(EnsembleSpec::gaussian(2.0, 10), 1, 0.0);
        CHECK(s.u_plus.real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
        CHECK(std::fabs(s.u_plus.imag()) < 1e-15);
        CHECK(s.u_minus.real() == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-15));
        CHECK(s.R == doctest::Approx(4.0).epsilon(1e-15));
        CHECK(std::fabs(s.theta_plus) < 1e-15);
        CHECK(std::fabs(s.theta_minus) < 1e-15);
        CHECK(s.f_sum == doctest::Approx(-1.0 - std::log(2.0)).epsilon(1e-15));
    }
    SUBCASE("LaguerreFixed lambda=1/2") {
        const SaddleData s = saddle(EnsembleSpec::laguerre_fixed(2.0, 10, 0.0), 1, 0.5);
        CHECK(s.u_plus.real() == doctest::Approx(-0.5).epsilon(1e-15));
        CHECK(s.u_plus.imag() == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(s.u_minus.imag() == doctest::Approx(-0.5).epsilon(1e-15));
        CHECK(s.R == doctest::Approx(4.0).epsilon(1e-15));
        CHECK(s.theta_plus == doctest::Approx(-0.75 * kPi).epsilon(1e-15));
        CHECK(s.theta_minus == doctest::Approx(-0.25 * kPi).epsilon(1e-15));
    }
    SUBCASE("JacobiFixed lambda=1/2") {
        const SaddleData s = saddle(EnsembleSpec::jacobi_fixed(2.0, 10, 0.0, 0.0), 1, 0.5);
        CHECK(std::fabs(s.u_plus.real()) < 1e-15);
        CHECK(s.u_plus.imag() == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(s.u_minus.imag() == doctest::Approx(-1.0).epsilon(1e-15));
        CHECK(s.R == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(s.theta_plus == doctest::Approx(-kPi).epsilon(1e-15));
        CHECK(std::fabs(s.theta_minus) < 1e-15);
    }
    CHECK_THROWS_AS(saddle(EnsembleSpec::gaussian(2.0, 10), 1, 1.5), SupportError);
    CHECK_THROWS_AS(saddle(EnsembleSpec::jacobi_fixed(2.0, 10, 0.0, 0.0), 1, 1.0), SupportError);
}

TEST_CASE("saddle invariants at random interior points") {
    std::mt19937_64 rng(20240601);
    for (double beta : {1.0, 2.0, 4.0}) {
        for (const EnsembleSpec& s : gate_families(beta, 40)) {
            const SpectralSupport sp = limiting_support(s);
            std::uniform_real_distribution<double> U(sp.lower + 0.02 * sp.width(), sp.upper - 0.02 * sp.width());
            for (int i = 0; i < 20; ++i) {
                const double lam = U(rng);
                for (int p : {1, 2}) {
                    CAPTURE(family_name(s.family));
                    CAPTURE(lam);
                    const SaddleData sd = saddle(s, p, lam);
                    const PhaseFunction f(s, p, lam);
                    CHECK(std::abs(f.d1(sd.u_plus)) < 1e-10);
                    CHECK(std::abs(f.d1(sd.u_minus)) < 1e-10);
                    CHECK(std::abs(std::abs(f.d2(sd.u_plus)) - sd.R) < 1e-10 * std::max(1.0, sd.R));
                    CHECK(std::abs(std::abs(f.d2(sd.u_minus)) - sd.R) < 1e-10 * std::max(1.0, sd.R));
                    // steepest-descent direction: theta = (pi - arg f'') / 2 modulo pi
                    const double ep = std::remainder(sd.theta_plus - 0.5 * (kPi - std::arg(f.d2(sd.u_plus))), kPi);
                    const double em = std::remainder(sd.theta_minus - 0.5 * (kPi - std::arg(f.d2(sd.u_minus))), kPi);
                    CHECK(std::fabs(ep) < 1e-10);
                    CHECK(std::fabs(em) < 1e-10);
                    const double direct = (f.value_tilde(sd.u_plus) + f.value_tilde(sd.u_minus)).real();
                    CHECK(sd.f_sum == doctest::Approx(direct).epsilon(1e-12));
                }
            }
        }
    }
}

TEST_CASE("LaguerreScaled saddle discriminant equals (2 pi lambda rho)^2") {
    for (double al : {0.0, 0.5, 1.0, 3.0}) {
        const SpectralSupport sp = laguerre_scaled_support(al);
        for (int i = 1; i < 10; ++i) {
            const double lam = sp.lower + sp.width() * i / 10.0;
            const SaddleData sd = saddle(EnsembleSpec::laguerre_scaled(2.0, 10, al), 1, lam);
            // u = (al - lam +- i sqrt(D)) / (2 lam)
            const double D = std::pow(2.0 * lam * sd.u_plus.imag(), 2);
            const double r = 2.0 * kPi * lam * rho_laguerre_scaled(lam, al);
            CHECK(D == doctest::Approx(r * r).epsilon(1e-10));
        }
    }
}

TEST_CASE("dual_moment_p1 closed form at N=1") {
    for (double lam : {-0.7, 0.0, 0.2, 1.3})
        CHECK(dual_moment_p1(EnsembleSpec::gaussian(2.0, 1), lam).value() ==
              doctest::Approx(lam * lam + 0.25).epsilon(1e-10));
}

TEST_CASE("dual_moment_p1 matches brute force at N=3, lambda=0.2") {
    const double b2 = brute_force_moment(EnsembleSpec::gaussian(2.0, 3), {0.2, 1}).value();
    CHECK(rel(dual_moment_p1(EnsembleSpec::gaussian(2.0, 3), 0.2).value(), b2) < 1e-6);
    const double b4 = brute_force_moment(EnsembleSpec::gaussian(4.0, 3), {0.2, 1}).value();
    CHECK(rel(dual_moment_p1(EnsembleSpec::gaussian(4.0, 3), 0.2).value(), b4) < 1e-5);
}

TEST_CASE("duality against brute force, N <= 2 all families, N = 3 one point each") {
    for (double beta : {1.0, 2.0, 4.0}) {
        for (int N : {1, 2}) {
            const auto fams = gate_families(beta, N);
            for (std::size_t f = 0; f < fams.size(); ++f)
                for (double lam : kGateLambdas[f]) {
                    CAPTURE(family_name(fams[f].family));
                    CAPTURE(beta);
                    CAPTURE(N);
                    CAPTURE(lam);
                    CHECK(rel(dual_moment_p1(fams[f], lam).value(), brute_force_moment(fams[f], {lam, 1}).value()) <
                          1e-5);
                }
        }
    }
    const auto fams = gate_families(2.0, 3);
    for (std::size_t f = 0; f < fams.size(); ++f) {
        const double lam = kGateLambdas[f][1];
        CAPTURE(family_name(fams[f].family));
        CHECK(rel(dual_moment_p1(fams[f], lam).value(), brute_force_moment(fams[f], {lam, 1}).value()) < 1e-5);
    }
}

TEST_CASE("beta2_determinant_moment closed form at N=1") {
    for (double lam : {-0.7, 0.0, 0.2, 1.3})
        CHECK(beta2_determinant_moment(EnsembleSpec::gaussian(2.0, 1), {lam, 1}).value() ==
              doctest::Approx(lam * lam + 0.25).epsilon(1e-10));
    CHECK_THROWS_AS(beta2_determinant_moment(EnsembleSpec::gaussian(1.0, 4), {0.2, 1}), DomainError);
}

TEST_CASE("two exact beta=2 paths agree for N <= 64") {
    for (int N : {1, 2, 5, 16, 64}) {
        CAPTURE(N);
        const EnsembleSpec g = EnsembleSpec::gaussian(2.0, N);
        CHECK(rel(beta2_determinant_moment(g, {0.3, 1}).value(), dual_moment_p1(g, 0.3).value()) < 1e-8);
    }
    for (int N : {2, 7, 16}) {
        const auto fams = gate_families(2.0, N);
        for (std::size_t f = 0; f < fams.size(); ++f)
            for (double lam : kGateLambdas[f]) {
                CAPTURE(family_name(fams[f].family));
                CAPTURE(N);
                CAPTURE(lam);
                const SignedLog a = beta2_determinant_moment(fams[f], {lam, 1});
                const SignedLog b = dual_moment_p1(fams[f], lam);
                CHECK(std::fabs(a.log_abs - b.log_abs) < 1e-8);
            }
    }
}

TEST_CASE("beta2_determinant_moment p=2 approaches the prediction like 1/N") {
    std::vector<double> scaled;
    for (int N : {16, 32, 64, 128}) {
        const EnsembleSpec g = EnsembleSpec::gaussian(2.0, N);
        const double d = beta2_determinant_moment(g, {0.3, 2}).log_abs - predict(g, {0.3, 2}).log_value;
        scaled.push_back(N * d);
    }
    // N * (log deviation) settles to a constant
    for (std::size_t i = 1; i < scaled.size(); ++i) CHECK(std::fabs(scaled[i] - scaled[0]) < 0.5);
    CHECK(std::fabs(scaled.back()) / 128.0 < 0.05);
}

TEST_CASE("beta2_determinant_moment p=2 matches brute force at small N") {
    for (int N : {1, 2}) {
        const auto fams = gate_families(2.0, N);
        for (std::size_t f = 0; f < fams.size(); ++f) {
            const double lam = kGateLambdas[f][0];
            CAPTURE(family_name(fams[f].family));
            CAPTURE(N);
            CHECK(rel(beta2_determinant_moment(fams[f], {lam, 2}).value(),
                      brute_force_moment(fams[f], {lam, 2}).value()) < 1e-7);
        }
    }
}

TEST_CASE("brute_force_moment examples") {
    for (double lam : {-0.5, 0.1, 0.9})
        CHECK(brute_force_moment(EnsembleSpec::gaussian(2.0, 1), {lam, 1}).value() ==
              doctest::Approx(lam * lam + 0.25).epsilon(1e-9));

    SUBCASE("N=2 Gaussian beta=2 under (x1-x2)^2 exp(-x1^2-x2^2)") {
        const auto w = [](double x1, double x2) { return (x1 - x2) * (x1 - x2) * std::exp(-x1 * x1 - x2 * x2); };
        const double Z = ordered_2d(w, -12.0, 12.0);
        const double e12 = ordered_2d([&](double a, double b) { return a * b * w(a, b); }, -12.0, 12.0) / Z;
        CHECK(e12 == doctest::Approx(-0.5).epsilon(1e-10));
        for (double x : {-1.0, 0.3, 2.0}) {
            const double m = ordered_2d([&](double a, double b) { return (x - a) * (x - b) * w(a, b); }, -12.0, 12.0) / Z;
            CHECK(m == doctest::Approx(x * x - 0.5).epsilon(1e-10));
            CHECK(hermite_mean_charpoly(2, 2.0, x) == doctest::Approx(m).epsilon(1e-10));
        }
        // the library's e^{-4x^2} convention is the same ensemble with x -> x/2
        for (double lam : {0.1, 0.6}) {
            const double y = 2.0 * lam;
            const double o =
                ordered_2d([&](double a, double b) { return std::pow((y - a) * (y - b), 2) * w(a, b); }, -12.0, 12.0) /
                Z / 16.0;
            CHECK(brute_force_moment(EnsembleSpec::gaussian(2.0, 2), {lam, 1}).value() ==
                  doctest::Approx(o).epsilon(1e-8));
        }
    }

    SUBCASE("N=2 JacobiFixed a1=a2=0 lambda=1/2 against the unit square") {
        const auto w = [](double a, double b) { return (a - b) * (a - b); };
        const double Z = ordered_2d(w, 0.0, 1.0);
        const double o =
            ordered_2d([&](double a, double b) { return std::pow((0.5 - a) * (0.5 - b), 2) * w(a, b); }, 0.0, 1.0) / Z;
        const EnsembleSpec s = EnsembleSpec::jacobi_fixed(2.0, 2, 0.0, 0.0);
        const double bf = brute_force_moment(s, {0.5, 1}).value();
        CHECK(bf == doctest::Approx(o).epsilon(1e-8));
        CHECK(beta2_determinant_moment(s, {0.5, 1}).value() == doctest::Approx(bf).epsilon(1e-8));
    }

    CHECK_THROWS_AS(brute_force_moment(EnsembleSpec::gaussian(2.0, 4), {0.1, 1}), DomainError);
    CHECK_THROWS_AS(brute_force_moment(EnsembleSpec::gaussian(2.0, 2), {0.1, 3}), DomainError);
}

TEST_CASE("hermite_mean_charpoly examples") {
    for (double beta : {1.0, 2.0, 4.0}) {
        CHECK(hermite_mean_charpoly(1, beta, 0.7) == doctest::Approx(0.7).epsilon(1e-15));
        CHECK(hermite_mean_charpoly(2, beta, 0.7) == doctest::Approx(0.49 - 0.5).epsilon(1e-14));
        CHECK(hermite_mean_charpoly(3, beta, 1.0) == doctest::Approx(-0.5).epsilon(1e-15));
    }
    // explicit H_5(x) = 32x^5 - 160x^3 + 120x
    const double x = 0.37;
    CHECK(hermite_mean_charpoly(5, 2.0, x) ==
          doctest::Approx((32 * std::pow(x, 5) - 160 * std::pow(x, 3) + 120 * x) / 32.0).epsilon(1e-13));
}

TEST_CASE("LaguerreScaled determinant converges across the bulk") {
    // circles through -1 that pass near the pole at 0 used to stall these cases
    for (double al : {0.0, 1.3})
        for (int N : {7, 64}) {
            const EnsembleSpec s = EnsembleSpec::laguerre_scaled(2.0, N, al);
            const SpectralSupport sup = limiting_support(s);
            for (int i = 3; i < 20; i += 2) {
                const double l = sup.lower + sup.width() * i / 20.0;
                CAPTURE(al);
                CAPTURE(N);
                CAPTURE(l);
                CHECK(std::fabs(beta2_determinant_moment(s, {l, 1}).log_abs - dual_moment_p1(s, l).log_abs) < 1e-7);
            }
        }
}
