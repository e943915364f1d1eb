#pragma once

#include <complex>

namespace cpm {

// Real number stored as sign and natural log of the magnitude.
struct SignedLog {
    int sign = 0;          // -1, 0 or +1
    double log_abs = 0.0;  // ignored when sign == 0

    static SignedLog from_value(double x);
    static SignedLog from_log(double log_abs, int sign = 1);
    static SignedLog zero() { return {}; }

    double value() const;
    bool is_zero() const { return sign == 0; }

    SignedLog operator-() const { return {-sign, log_abs}; }
    SignedLog& operator*=(const SignedLog& o);
    SignedLog& operator/=(const SignedLog& o);
    SignedLog& operator+=(const SignedLog& o);
};

SignedLog operator*(SignedLog a, const SignedLog& b);
SignedLog operator/(SignedLog a, const SignedLog& b);
SignedLog operator+(SignedLog a, const SignedLog& b);
SignedLog operator-(SignedLog a, const SignedLog& b);

// Complex number stored as principal phase in (-pi, pi] and log-magnitude.
struct ComplexLog {
    double phase = 0.0;
    double log_abs = 0.0;

    static ComplexLog from_complex(std::complex<double> z);
    // exp(w) for complex w, i.e. the ComplexLog whose log is w.
    static ComplexLog from_log(std::complex<double> w);

    std::complex<double> value() const;
    std::complex<double> log() const { return {log_abs, phase}; }

    ComplexLog& operator*=(const ComplexLog& o);
    ComplexLog& operator/=(const ComplexLog& o);
};

ComplexLog operator*(ComplexLog a, const ComplexLog& b);
ComplexLog operator/(ComplexLog a, const ComplexLog& b);

// Reduce an angle into (-pi, pi].
double wrap_phase(double phi);

double log_gamma(double x);
double log_barnes_g(double x);
double log_binomial(long n, long k);

// log(sum_i exp(v_i)) without overflow.
double log_sum_exp(const double* v, std::size_t n);

} // namespace cpm
