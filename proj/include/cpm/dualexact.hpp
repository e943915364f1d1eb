#pragma once

#include "cpm/ensemble.hpp"
#include "cpm/quadrature.hpp"
#include "cpm/speclog.hpp"

#include <complex>

namespace cpm {

using cplx = std::complex<double>;

// Phase function f(u, lam) of the dual integral for one family, including its 1/N terms.
// Circle families (Laguerre, Jacobi) also expose the shifted form
//   f~ = f - 2(2p - 1)/(beta N) ln u.
class PhaseFunction {
public:
    PhaseFunction(const EnsembleSpec& spec, int p, double lam);

    const EnsembleSpec& spec() const { return spec_; }
    bool on_circle() const { return spec_.family != Family::GaussianGlobal; }

    // exp(f(u)) as a ComplexLog, principal branches throughout.
    ComplexLog eval(cplx u) const { return ComplexLog::from_log(value(u)); }
    // f(u) itself (principal logarithms, not reduced modulo 2 pi i).
    cplx value(cplx u) const;
    cplx value_tilde(cplx u) const;  // f~ for circle families, f for the Gaussian
    // Leading-order (N -> infinity) first and second derivatives.
    cplx d1(cplx u) const;
    cplx d2(cplx u) const;

private:
    EnsembleSpec spec_;
    int p_;
    double lam_;
};

struct SaddleData {
    cplx u_plus;
    cplx u_minus;
    double R = 0.0;
    double theta_plus = 0.0;
    double theta_minus = 0.0;
    double f_sum = 0.0;
};

// Closed-form saddle data of the family's phase function; throws SupportError off-support.
SaddleData saddle(const EnsembleSpec& spec, int p, double lam);

// Exact <prod |lam - x_l|^2> for any beta > 0 via the two-variable dual integral.
SignedLog dual_moment_p1(const EnsembleSpec& spec, double lam);

// Exact moment at beta = 2 as a 2p x 2p determinant of one-dimensional contour integrals.
SignedLog beta2_determinant_moment(const EnsembleSpec& spec, const MomentQuery& q);

// Direct N-fold quadrature of the defining joint density, N <= 3, p <= 2.
SignedLog brute_force_moment(const EnsembleSpec& spec, const MomentQuery& q);

// 2^{-N} H_N(x), the mean characteristic polynomial under exp(-beta x^2 / 2) for every beta.
double hermite_mean_charpoly(int N, double beta, double x);

} // namespace cpm
