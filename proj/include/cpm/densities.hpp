#pragma once

namespace cpm {

struct SpectralSupport {
    double lower = 0.0;
    double upper = 0.0;

    bool contains_open(double x) const { return x > lower && x < upper; }
    double width() const { return upper - lower; }
};

double rho_wigner(double lam);
double rho_mp(double lam);
double rho_jacobi(double lam);

SpectralSupport laguerre_scaled_support(double alpha);
double rho_laguerre_scaled(double lam, double alpha);

SpectralSupport jacobi_scaled_support(double a1, double a2);
double rho_jacobi_scaled(double lam, double a1, double a2);

} // namespace cpm
