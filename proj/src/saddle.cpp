#include "cpm/dualexact.hpp"

#include "cpm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace cpm {

namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrt2 = std::numbers::sqrt2;
const cplx I1(0.0, 1.0);

void require_support(const EnsembleSpec& spec, double lam) {
    spec.validate();
    const SpectralSupport s = limiting_support(spec);
    if (!s.contains_open(lam))
        throw SupportError("lambda = " + std::to_string(lam) + " is outside the open support of " +
                           family_name(spec.family));
}

double kappa_of(double lam) { return lam / (1.0 - lam); }

} // namespace

PhaseFunction::PhaseFunction(const EnsembleSpec& spec, int p, double lam) : spec_(spec), p_(p), lam_(lam) {
    spec_.validate();
    if (p < 1) throw DomainError("p must be a positive integer");
}

cplx PhaseFunction::value(cplx u) const {
    const double b = spec_.beta, N = spec_.N, l = lam_;
    const cplx lu = std::log(u), l1u = std::log(1.0 + u);
    switch (spec_.family) {
    case Family::GaussianGlobal: return -u * u + std::log(kSqrt2 * I1 * l - u);
    case Family::LaguerreFixed: {
        const double a = spec_.param1;
        return -lu + l1u - 4.0 * l * u + (1.0 / N) * (-lu + (2.0 * (a + 1.0) / b - 1.0) * l1u);
    }
    case Family::LaguerreScaled: {
        const double al = spec_.param1;
        return -lu - l * u + (al + 1.0) * l1u - (1.0 / N) * (lu + (1.0 - 2.0 / b) * l1u);
    }
    case Family::JacobiFixed: {
        const double a1 = spec_.param1, a2 = spec_.param2, k = kappa_of(l);
        return -lu + l1u + std::log(1.0 - k * u) +
               (1.0 / N) * (((2.0 / b) * (a1 + a2 + 2.0) - 2.0) * l1u - (2.0 / b) * (a2 + 1.0) * lu);
    }
    case Family::JacobiScaled: {
        const double a1 = spec_.param1, a2 = spec_.param2, k = kappa_of(l);
        return -(a2 + 1.0) * lu + (a1 + a2 + 1.0) * l1u + std::log(1.0 - k * u) +
               (1.0 / N) * (-(2.0 / b) * lu + (4.0 / b - 2.0) * l1u);
    }
    }
    return 0.0;
}

cplx PhaseFunction::value_tilde(cplx u) const {
    if (!on_circle()) return value(u);
    return value(u) - 2.0 * (2.0 * p_ - 1.0) / (spec_.beta * spec_.N) * std::log(u);
}

cplx PhaseFunction::d1(cplx u) const {
    const double l = lam_;
    switch (spec_.family) {
    case Family::GaussianGlobal: return -2.0 * u - 1.0 / (kSqrt2 * I1 * l - u);
    case Family::LaguerreFixed: return -1.0 / u + 1.0 / (1.0 + u) - 4.0 * l;
    case Family::LaguerreScaled: return -1.0 / u - l + (spec_.param1 + 1.0) / (1.0 + u);
    case Family::JacobiFixed: {
        const double k = kappa_of(l);
        return -1.0 / u + 1.0 / (1.0 + u) - k / (1.0 - k * u);
    }
    case Family::JacobiScaled: {
        const double a1 = spec_.param1, a2 = spec_.param2, k = kappa_of(l);
        return -(a2 + 1.0) / u + (a1 + a2 + 1.0) / (1.0 + u) - k / (1.0 - k * u);
    }
    }
    return 0.0;
}

cplx PhaseFunction::d2(cplx u) const {
    const double l = lam_;
    switch (spec_.family) {
    case Family::GaussianGlobal: {
        const cplx w = kSqrt2 * I1 * l - u;
        return -2.0 - 1.0 / (w * w);
    }
    case Family::LaguerreFixed: return 1.0 / (u * u) - 1.0 / ((1.0 + u) * (1.0 + u));
    case Family::LaguerreScaled: return 1.0 / (u * u) - (spec_.param1 + 1.0) / ((1.0 + u) * (1.0 + u));
    case Family::JacobiFixed: {
        const double k = kappa_of(l);
        const cplx w = 1.0 - k * u;
        return 1.0 / (u * u) - 1.0 / ((1.0 + u) * (1.0 + u)) - k * k / (w * w);
    }
    case Family::JacobiScaled: {
        const double a1 = spec_.param1, a2 = spec_.param2, k = kappa_of(l);
        const cplx w = 1.0 - k * u;
        return (a2 + 1.0) / (u * u) - (a1 + a2 + 1.0) / ((1.0 + u) * (1.0 + u)) - k * k / (w * w);
    }
    }
    return 0.0;
}

SaddleData saddle(const EnsembleSpec& spec, int p, double lam) {
    require_support(spec, lam);
    if (p < 1) throw DomainError("p must be a positive integer");
    const double b = spec.beta, N = spec.N, P = p;
    SaddleData s;
    switch (spec.family) {
    case Family::GaussianGlobal: {
        const double r = std::sqrt(1.0 - lam * lam);
        s.u_plus = cplx(r, lam) / kSqrt2;
        s.u_minus = cplx(-r, lam) / kSqrt2;
        s.R = 4.0 * r;
        s.theta_plus = -0.5 * std::asin(lam);
        s.theta_minus = 0.5 * std::asin(lam);
        s.f_sum = 2.0 * lam * lam - 1.0 - std::log(2.0);
        break;
    }
    case Family::LaguerreFixed: {
        const double a = spec.param1;
        const double w = std::sqrt(1.0 / lam - 1.0);
        s.u_plus = cplx(-1.0, w) / 2.0;
        s.u_minus = cplx(-1.0, -w) / 2.0;
        s.R = 16.0 * lam * lam * w;
        s.theta_plus = -0.75 * kPi;
        s.theta_minus = -0.25 * kPi;
        s.f_sum = 4.0 * lam + (1.0 / N) * ((2.0 / b) * (2.0 * P - 1.0 - (a + 1.0)) + 2.0) * std::log(4.0 * lam);
        break;
    }
    case Family::LaguerreScaled: {
        const double al = spec.param1;
        const double D = 4.0 * lam - (lam - al) * (lam - al);
        const double sq = std::sqrt(D);
        s.u_plus = cplx(al - lam, sq) / (2.0 * lam);
        s.u_minus = cplx(al - lam, -sq) / (2.0 * lam);
        s.R = lam * sq / std::sqrt(al + 1.0);
        const double X = std::clamp((al + 2.0 - al * al / lam) / (2.0 * std::sqrt(al + 1.0)), -1.0, 1.0);
        s.theta_plus = kPi + 0.5 * std::asin(X);
        s.theta_minus = -0.5 * std::asin(X);
        s.f_sum = lam - al + (-al + (1.0 / N) * (2.0 * (1.0 - 2.0 / b) + 4.0 * P / b)) * std::log(lam) +
                  (al + 1.0 - (1.0 / N) * (1.0 - 2.0 / b)) * std::log1p(al);
        break;
    }
    case Family::JacobiFixed: {
        const double a1 = spec.param1, a2 = spec.param2;
        const double w = std::sqrt(1.0 / lam - 1.0);
        s.u_plus = cplx(0.0, w);
        s.u_minus = cplx(0.0, -w);
        s.R = 2.0 * std::pow(lam, 1.5) / std::sqrt(1.0 - lam);
        const double as = std::asin(1.0 - 2.0 * lam);
        s.theta_plus = 0.5 * as - kPi;
        s.theta_minus = -0.5 * as;
        s.f_sum = -2.0 * std::log1p(-lam) - (1.0 / N) * (((2.0 / b) * (a1 + 2.0 - 2.0 * P) - 2.0) * std::log(lam) +
                                                          (2.0 / b) * (a2 + 2.0 * P) * std::log1p(-lam));
        break;
    }
    case Family::JacobiScaled: {
        const double a1 = spec.param1, a2 = spec.param2, A = a1 + a2;
        const double D = ((A + 2.0) * (A + 2.0) + a1 * a1 - a2 * a2) * lam - (A + 2.0) * (A + 2.0) * lam * lam - a1 * a1;
        const double sq = std::sqrt(std::max(D, 0.0));
        const double re = (a2 - a1) * lam + a1;
        const double den = 2.0 * lam * (a1 + 1.0);
        s.u_plus = cplx(re, sq) / den;
        s.u_minus = cplx(re, -sq) / den;
        s.R = std::pow(1.0 + a1, 1.5) * lam * sq / (std::sqrt(1.0 + a2) * std::sqrt(1.0 + A) * (1.0 - lam));
        const double phi_m = std::arg(PhaseFunction(spec, p, lam).d2(s.u_minus));
        double th = 0.5 * (kPi - phi_m);
        while (th > 0.5 * kPi) th -= kPi;
        while (th <= -0.5 * kPi) th += kPi;
        s.theta_minus = th;
        s.theta_plus = kPi - th;
        const double l1a = std::log1p(A), l1 = std::log1p(a1), l2 = std::log1p(a2);
        s.f_sum = (1.0 + A) * l1a - (1.0 + a1) * l1 - (1.0 + a2) * l2 - a1 * std::log(lam) -
                  (a2 + 2.0) * std::log1p(-lam) +
                  (4.0 / (b * N)) * ((1.0 - b / 2.0) * l1a + (P - 1.0 + b / 2.0) * l1 - P * l2 - P * std::log1p(-lam) +
                                     (P - 1.0 + b / 2.0) * std::log(lam));
        break;
    }
    }
    return s;
}

double hermite_mean_charpoly(int N, double /*beta*/, double x) {
    if (N < 0) throw DomainError("hermite_mean_charpoly: N must be nonnegative");
    // monic recurrence h_{n+1} = x h_n - (n/2) h_{n-1}, h_n = 2^{-n} H_n
    double h0 = 1.0, h1 = x;
    if (N == 0) return h0;
    for (int n = 1; n < N; ++n) {
        const double h2 = x * h1 - 0.5 * n * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

} // namespace cpm
