#pragma once

#include "cpm/speclog.hpp"

namespace cpm {

// beta / 2 = m / n with gcd(m, n) = 1.
struct RationalBeta {
    int m = 1;
    int n = 1;

    RationalBeta() = default;
    RationalBeta(int m_, int n_);  // throws DomainError unless m, n >= 1 and coprime
    double beta() const { return 2.0 * m / n; }
};

SignedLog a_beta_p(double beta, int p);
SignedLog a_tilde(const RationalBeta& rb, int p);

// Equivalent gamma-ratio form prod Gamma(2j/beta) / Gamma(2(j+p)/beta); used only as a cross-check.
SignedLog a_beta_p_ratio_form(double beta, int p);

// |LHS - RHS| in log form of the gamma / Barnes-G product identity.
double gamma_product_identity_residual(double s, int m, int n, int p);

// Gamma multiplication formula residual for prod_{k<n} Gamma(z + k/n).
double gamma_multiplication_residual(double z, int n);

SignedLog gamma_n_beta(int n, double beta);

// C_{beta', 2p}[exp(-N x^2)], beta' the dual index.
SignedLog selberg_gaussian(double beta_dual, int twop, int N);

// int over R_+^N of prod x^{a beta/2} e^{-beta x/2} |Delta|^beta
SignedLog selberg_laguerre(double a, double beta, int N);

SignedLog morris_integral(int N, double a, double b, double lam);
SignedLog selberg_jacobi(int N, double l1, double l2, double lam);

// Partition functions C_{beta,N}[w] for the three classical weights.
SignedLog partition_gaussian(double beta, int N, double kappa);         // w = exp(-kappa x^2)
SignedLog partition_laguerre(double beta, int N, double a, double b);   // w = x^a exp(-b x)
SignedLog partition_jacobi(double beta, int N, double a1, double a2);   // w = x^a1 (1-x)^a2 on (0,1)

} // namespace cpm
