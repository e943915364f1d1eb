#include "cpm/asymptotics.hpp"

#include "cpm/constants.hpp"
#include "cpm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace cpm {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLn2 = std::numbers::ln2;

void require_interior(const EnsembleSpec& spec, const MomentQuery& q) {
    spec.validate();
    if (q.p < 1) throw DomainError("p must be a positive integer");
    const SpectralSupport s = limiting_support(spec);
    if (!s.contains_open(q.lam))
        throw SupportError("lambda = " + std::to_string(q.lam) + " is outside the open support (" +
                           std::to_string(s.lower) + ", " + std::to_string(s.upper) + ") of " +
                           family_name(spec.family));
    if (!(limiting_density(spec, q.lam) > 0.0))
        throw SupportError("limiting density vanishes at lambda = " + std::to_string(q.lam));
}

// ln(G(1+p)^2 / G(1+2p)), the beta = 2 value of A.
double log_barnes_ratio(int p) { return 2.0 * log_barnes_g(1.0 + p) - log_barnes_g(1.0 + 2.0 * p); }

} // namespace

double error_exponent(double beta) {
    if (!(beta > 0.0)) throw DomainError("beta must be positive");
    return std::min(2.0 / beta, 1.0);
}

double g2_exponent(double a1, double a2, double lam) {
    if (!(a1 >= 0.0 && a2 >= 0.0)) throw DomainError("g2_exponent: alpha1, alpha2 must be >= 0");
    if (!(lam > 0.0 && lam < 1.0)) throw DomainError("g2_exponent: lambda must lie in (0,1)");
    const double A = a1 + a2;
    return (1 + A) * std::log1p(A) + (1 + a1) * std::log1p(a1) + (1 + a2) * std::log1p(a2) -
           2 * (2 + A) * std::log(2 + A) - a1 * std::log(lam) - a2 * std::log1p(-lam);
}

Prediction predict(const EnsembleSpec& spec, const MomentQuery& q) {
    require_interior(spec, q);
    const double b = spec.beta;
    const double p = q.p;
    const double N = spec.N;
    const double lam = q.lam;
    const double rho = limiting_density(spec, lam);
    const double c_pref = p * (2.0 - b) / b;  // exponent of the density prefactor
    const double c_n = 2.0 * p * p / b;       // exponent of the N-dependent factor
    double v = a_beta_p(b, q.p).log_abs;

    switch (spec.family) {
    case Family::GaussianGlobal:
        v += c_pref * std::log(kPi * rho) + c_n * std::log(kPi * N * rho) +
             2.0 * N * p * (lam * lam - 0.5 - kLn2);
        break;
    case Family::LaguerreFixed: {
        const double a = spec.param1;
        v += c_pref * std::log(0.5 * kPi * rho) + c_n * std::log(0.5 * kPi * N * rho) -
             (2.0 * p * a / b) * std::log(4.0 * lam) + 2.0 * p * N * (2.0 * lam - 1.0 - 2.0 * kLn2);
        break;
    }
    case Family::LaguerreScaled: {
        const double al = spec.param1;
        const double K = 2.0 * kPi * std::sqrt(al + 1.0) * rho;
        // alpha ln(alpha + 1) - alpha ln(lam) written so that alpha = 0 is exact
        v += c_pref * std::log(K) + c_n * std::log(N * K) +
             p * N * (lam - al * std::log(lam) + (al + 1.0) * std::log1p(al) - al - 2.0);
        break;
    }
    case Family::JacobiFixed: {
        const double a1 = spec.param1, a2 = spec.param2;
        v += c_pref * std::log(0.25 * kPi * rho) + c_n * std::log(0.5 * kPi * N * rho) -
             (2.0 * p * a1 / b) * std::log(4.0 * lam) - (2.0 * p * a2 / b) * std::log(4.0 - 4.0 * lam) -
             4.0 * p * N * kLn2;
        break;
    }
    case Family::JacobiScaled: {
        const double a1 = spec.param1, a2 = spec.param2;
        const double s = 2.0 + a1 + a2;
        const double K1 = 2.0 * kPi * std::sqrt((1 + a1) * (1 + a2) * (1 + a1 + a2)) / (s * s);
        const double K2 = 2.0 * kPi * std::sqrt((1 + a1) * (1 + a2)) * std::pow(1 + a1 + a2, 1.5) / (s * s * s);
        v += c_n * std::log(K1 * N * rho) + c_pref * std::log(K2 * rho) + p * N * g2_exponent(a1, a2, lam);
        break;
    }
    }
    return {v, error_exponent(b)};
}

double Cg21Coefficients::log_value(int N) const { return C1 * N + C2 * std::log(static_cast<double>(N)) + C3; }

double int1_oracle(double a, double b) {
    if (!(b > std::fabs(a))) throw DomainError("int1_oracle requires b > |a|");
    return kPi * std::log(0.5 * (b + std::sqrt(b * b - a * a)));
}

Cg21Coefficients cg21_coefficients(const EnsembleSpec& spec, const MomentQuery& q) {
    if (spec.beta != 2.0) throw UnsupportedError("cg21 coefficients exist only for beta = 2");
    require_interior(spec, q);
    const double p = q.p;
    const double lam = q.lam;
    const double gr = log_barnes_ratio(q.p);
    Cg21Coefficients c;
    c.C2 = p * p;

    // Generic soft-edge form on [-1, 1] after lam = A + B t:
    //   C1 = -2p ln2 - (p/pi) int V/sqrt(1-x^2) + p V(t) + 2p ln B
    //   C3 = p^2 ln((pi/2) psi(t)) + p^2 ln(2 sqrt(1-t^2)) + ln(G(1+p)^2/G(1+2p))
    switch (spec.family) {
    case Family::GaussianGlobal: {
        // V = 2x^2 (weight exp(-2N x^2) at beta = 2), int V/sqrt(1-x^2) = pi, psi = 2/pi
        c.C1 = -2.0 * p * kLn2 - p + 2.0 * p * lam * lam;
        c.C3 = p * p * std::log(2.0 * std::sqrt(1.0 - lam * lam)) + gr;
        break;
    }
    case Family::LaguerreFixed: {
        const double a = spec.param1;
        const double mu = 2.0 * lam - 1.0;
        c.C1 = 2.0 * p * (mu - kLn2) - 2.0 * p * kLn2;
        c.C3 = p * p * std::log(std::sqrt((1.0 - mu) / (1.0 + mu))) + gr - p * a * std::log(2.0 * std::fabs(mu + 1.0));
        break;
    }
    case Family::LaguerreScaled: {
        const double al = spec.param1;
        const double B = 2.0 * std::sqrt(al + 1.0);
        const double A = al + 2.0;
        const double t = (lam - A) / B;
        // B = A exactly at alpha = 0, where the int1 term carries a zero coefficient
        const double IV = kPi * A - (al > 0.0 ? al * int1_oracle(B, A) : 0.0);
        const double V = B * t + A - al * std::log(B * t + A);
        const double psi = 2.0 * (al + 1.0) / (kPi * (B * t + A));
        c.C1 = -2.0 * p * kLn2 - (p / kPi) * IV + p * V + 2.0 * p * std::log(B);
        c.C3 = p * p * std::log(0.5 * kPi * psi) + p * p * std::log(2.0 * std::sqrt(1.0 - t * t)) + gr;
        break;
    }
    case Family::JacobiFixed: {
        const double a1 = spec.param1, a2 = spec.param2;
        const double t = 2.0 * lam - 1.0;
        c.C1 = -4.0 * p * kLn2;
        c.C3 = -p * (a1 + a2) * kLn2 - p * a1 * std::log1p(t) - p * a2 * std::log1p(-t) -
               0.5 * p * p * std::log1p(-t * t) + gr;
        break;
    }
    case Family::JacobiScaled: {
        const double al1 = spec.param1, al2 = spec.param2;
        const SpectralSupport s = jacobi_scaled_support(al1, al2);
        const double c1 = s.lower, c2 = s.upper;
        const double A = 0.5 * (c1 + c2);
        const double B = 0.5 * (c2 - c1);
        const double t = (lam - A) / B;
        const double IV = -(al1 > 0.0 ? al1 * int1_oracle(B, A) : 0.0) -
                          (al2 > 0.0 ? al2 * int1_oracle(-B, 1.0 - A) : 0.0);
        const double V = -al1 * std::log(A + B * t) - al2 * std::log(1.0 - A - B * t);
        const double psi = (al1 + al2 + 2.0) /
                           (2.0 * kPi * ((c1 + c2) / (c2 - c1) + t) * ((2.0 - c1 - c2) / (c2 - c1) - t));
        c.C1 = -2.0 * p * kLn2 - (p / kPi) * IV + p * V + 2.0 * p * std::log(B);
        c.C3 = p * p * std::log(0.5 * kPi * psi) + p * p * std::log(2.0 * std::sqrt(1.0 - t * t)) + gr;
        break;
    }
    }
    return c;
}

} // namespace cpm
