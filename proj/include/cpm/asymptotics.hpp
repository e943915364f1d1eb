#pragma once

#include "cpm/ensemble.hpp"

namespace cpm {

struct Prediction {
    double log_value = 0.0;
    double error_exponent = 1.0;
};

// min(2/beta, 1): the remainder is 1 + O(N^{-error_exponent}).
double error_exponent(double beta);

// Large-N leading term of <prod |lam - x_l|^{2p}>, in log form.
// Throws SupportError when lam is not strictly inside the limiting support.
Prediction predict(const EnsembleSpec& spec, const MomentQuery& q);

// Exponent function of the Jacobi family with parameters growing like N.
double g2_exponent(double a1, double a2, double lam);

// beta = 2 cross form: log moment ~ C1 N + C2 ln N + C3 in the EnsembleSpec conventions.
struct Cg21Coefficients {
    double C1 = 0.0;
    double C2 = 0.0;
    double C3 = 0.0;

    double log_value(int N) const;
};

Cg21Coefficients cg21_coefficients(const EnsembleSpec& spec, const MomentQuery& q);

// int_{-1}^{1} ln(a x + b) / sqrt(1 - x^2) dx = pi ln((b + sqrt(b^2 - a^2)) / 2), b > |a|.
double int1_oracle(double a, double b);

} // namespace cpm
