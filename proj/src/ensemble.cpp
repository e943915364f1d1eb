#include "cpm/ensemble.hpp"

#include "cpm/errors.hpp"

#include <cmath>
#include <limits>

namespace cpm {

std::string family_name(Family f) {
    switch (f) {
    case Family::GaussianGlobal: return "gaussian";
    case Family::LaguerreFixed: return "laguerre-fixed";
    case Family::LaguerreScaled: return "laguerre-scaled";
    case Family::JacobiFixed: return "jacobi-fixed";
    case Family::JacobiScaled: return "jacobi-scaled";
    }
    return "unknown";
}

Family parse_family(const std::string& name) {
    for (Family f : {Family::GaussianGlobal, Family::LaguerreFixed, Family::LaguerreScaled, Family::JacobiFixed,
                     Family::JacobiScaled})
        if (family_name(f) == name) return f;
    throw DomainError("unknown family '" + name +
                      "' (expected gaussian, laguerre-fixed, laguerre-scaled, jacobi-fixed, jacobi-scaled)");
}

EnsembleSpec EnsembleSpec::gaussian(double beta, int N) { return {Family::GaussianGlobal, beta, N, 0.0, 0.0}; }
EnsembleSpec EnsembleSpec::laguerre_fixed(double beta, int N, double a) { return {Family::LaguerreFixed, beta, N, a, 0.0}; }
EnsembleSpec EnsembleSpec::laguerre_scaled(double beta, int N, double alpha) {
    return {Family::LaguerreScaled, beta, N, alpha, 0.0};
}
EnsembleSpec EnsembleSpec::jacobi_fixed(double beta, int N, double a1, double a2) {
    return {Family::JacobiFixed, beta, N, a1, a2};
}
EnsembleSpec EnsembleSpec::jacobi_scaled(double beta, int N, double alpha1, double alpha2) {
    return {Family::JacobiScaled, beta, N, alpha1, alpha2};
}

EnsembleSpec EnsembleSpec::with_N(int n) const {
    EnsembleSpec s = *this;
    s.N = n;
    return s;
}

void EnsembleSpec::validate() const {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("beta must be a positive finite number");
    if (N < 1) throw DomainError("N must be a positive integer");
    switch (family) {
    case Family::GaussianGlobal: break;
    case Family::LaguerreFixed:
        if (!(param1 > -1.0)) throw DomainError("laguerre-fixed requires a > -1");
        break;
    case Family::LaguerreScaled:
        if (!(param1 >= 0.0)) throw DomainError("laguerre-scaled requires alpha >= 0");
        break;
    case Family::JacobiFixed:
        if (!(param1 > -1.0 && param2 > -1.0)) throw DomainError("jacobi-fixed requires a1, a2 > -1");
        break;
    case Family::JacobiScaled:
        if (!(param1 >= 0.0 && param2 >= 0.0)) throw DomainError("jacobi-scaled requires alpha1, alpha2 >= 0");
        break;
    }
}

double ClassicalWeight::log_weight(double x) const {
    constexpr double ninf = -std::numeric_limits<double>::infinity();
    switch (kind) {
    case Kind::Hermite: return -kappa * x * x;
    case Kind::Laguerre:
        if (!(x > 0.0)) return ninf;
        return a * std::log(x) - b * x;
    case Kind::Jacobi:
        if (!(x > 0.0 && x < 1.0)) return ninf;
        return a1 * std::log(x) + a2 * std::log1p(-x);
    }
    return ninf;
}

ClassicalWeight classical_weight(const EnsembleSpec& spec) {
    spec.validate();
    ClassicalWeight w;
    const double bN = spec.beta * spec.N;
    switch (spec.family) {
    case Family::GaussianGlobal:
        w.kind = ClassicalWeight::Kind::Hermite;
        w.kappa = bN;
        break;
    case Family::LaguerreFixed:
        w.kind = ClassicalWeight::Kind::Laguerre;
        w.a = spec.param1;
        w.b = 2.0 * bN;
        break;
    case Family::LaguerreScaled:
        w.kind = ClassicalWeight::Kind::Laguerre;
        w.a = 0.5 * bN * spec.param1;
        w.b = 0.5 * bN;
        break;
    case Family::JacobiFixed:
        w.kind = ClassicalWeight::Kind::Jacobi;
        w.a1 = spec.param1;
        w.a2 = spec.param2;
        break;
    case Family::JacobiScaled:
        w.kind = ClassicalWeight::Kind::Jacobi;
        w.a1 = 0.5 * bN * spec.param1;
        w.a2 = 0.5 * bN * spec.param2;
        break;
    }
    return w;
}

SpectralSupport limiting_support(const EnsembleSpec& spec) {
    switch (spec.family) {
    case Family::GaussianGlobal: return {-1.0, 1.0};
    case Family::LaguerreFixed:
    case Family::JacobiFixed: return {0.0, 1.0};
    case Family::LaguerreScaled: return laguerre_scaled_support(spec.param1);
    case Family::JacobiScaled: return jacobi_scaled_support(spec.param1, spec.param2);
    }
    return {};
}

double limiting_density(const EnsembleSpec& spec, double lam) {
    switch (spec.family) {
    case Family::GaussianGlobal: return rho_wigner(lam);
    case Family::LaguerreFixed: return rho_mp(lam);
    case Family::JacobiFixed: return rho_jacobi(lam);
    case Family::LaguerreScaled: return rho_laguerre_scaled(lam, spec.param1);
    case Family::JacobiScaled: return rho_jacobi_scaled(lam, spec.param1, spec.param2);
    }
    return 0.0;
}

} // namespace cpm
