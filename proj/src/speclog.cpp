#include "cpm/speclog.hpp"

#include "cpm/errors.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

namespace cpm {

namespace {

constexpr double kPi = std::numbers::pi;

// zeta'(-1)
constexpr double kZetaPrimeMinus1 = -0.16542114370045092921391966024278;

// Arguments below this are shifted upward with G(x) = G(x+1) / Gamma(x).
constexpr double kBarnesShift = 20.0;

// B_{2k+2} / (4 k (k+1)) for k = 1..8
constexpr double kBarnesSeries[] = {
    (-1.0 / 30.0) / 8.0,
    (1.0 / 42.0) / 24.0,
    (-1.0 / 30.0) / 48.0,
    (5.0 / 66.0) / 80.0,
    (-691.0 / 2730.0) / 120.0,
    (7.0 / 6.0) / 168.0,
    (-3617.0 / 510.0) / 224.0,
    (43867.0 / 798.0) / 288.0,
};

// ln G(z + 1) for large z
double barnes_asymptotic(double z) {
    const double lz = std::log(z);
    double s = 0.5 * z * z * lz - 0.75 * z * z + 0.5 * z * std::log(2.0 * kPi) - lz / 12.0 +
               kZetaPrimeMinus1;
    const double iz2 = 1.0 / (z * z);
    double pw = iz2;
    for (double c : kBarnesSeries) {
        s += c * pw;
        pw *= iz2;
    }
    return s;
}

} // namespace

double wrap_phase(double phi) {
    if (phi > -kPi && phi <= kPi) return phi;
    double r = std::remainder(phi, 2.0 * kPi);  // in [-pi, pi]
    if (r <= -kPi) r += 2.0 * kPi;
    return r;
}

SignedLog SignedLog::from_value(double x) {
    if (x == 0.0) return {};
    return {x > 0 ? 1 : -1, std::log(std::fabs(x))};
}

SignedLog SignedLog::from_log(double l, int s) {
    if (s == 0) return {};
    return {s > 0 ? 1 : -1, l};
}

double SignedLog::value() const {
    if (sign == 0) return 0.0;
    return sign * std::exp(log_abs);
}

SignedLog& SignedLog::operator*=(const SignedLog& o) {
    sign *= o.sign;
    log_abs = sign == 0 ? 0.0 : log_abs + o.log_abs;
    return *this;
}

SignedLog& SignedLog::operator/=(const SignedLog& o) {
    if (o.sign == 0) throw DomainError("SignedLog: division by zero");
    sign *= o.sign;
    log_abs = sign == 0 ? 0.0 : log_abs - o.log_abs;
    return *this;
}

SignedLog& SignedLog::operator+=(const SignedLog& o) {
    if (o.sign == 0) return *this;
    if (sign == 0) return *this = o;
    const double hi = std::max(log_abs, o.log_abs);
    const double s = sign * std::exp(log_abs - hi) + o.sign * std::exp(o.log_abs - hi);
    if (s == 0.0) return *this = {};
    sign = s > 0 ? 1 : -1;
    log_abs = hi + std::log(std::fabs(s));
    return *this;
}

SignedLog operator*(SignedLog a, const SignedLog& b) { return a *= b; }
SignedLog operator/(SignedLog a, const SignedLog& b) { return a /= b; }
SignedLog operator+(SignedLog a, const SignedLog& b) { return a += b; }
SignedLog operator-(SignedLog a, const SignedLog& b) { return a += -b; }

ComplexLog ComplexLog::from_complex(std::complex<double> z) {
    if (z == 0.0) return {0.0, -std::numeric_limits<double>::infinity()};
    return {std::arg(z), std::log(std::abs(z))};
}

ComplexLog ComplexLog::from_log(std::complex<double> w) { return {wrap_phase(w.imag()), w.real()}; }

std::complex<double> ComplexLog::value() const { return std::polar(std::exp(log_abs), phase); }

ComplexLog& ComplexLog::operator*=(const ComplexLog& o) {
    phase = wrap_phase(phase + o.phase);
    log_abs += o.log_abs;
    return *this;
}

ComplexLog& ComplexLog::operator/=(const ComplexLog& o) {
    phase = wrap_phase(phase - o.phase);
    log_abs -= o.log_abs;
    return *this;
}

ComplexLog operator*(ComplexLog a, const ComplexLog& b) { return a *= b; }
ComplexLog operator/(ComplexLog a, const ComplexLog& b) { return a /= b; }

double log_gamma(double x) {
    if (!(x > 0.0)) throw DomainError("log_gamma: argument must be positive, got " + std::to_string(x));
    return boost::math::lgamma(x);
}

double log_barnes_g(double x) {
    if (!(x > 0.0)) throw DomainError("log_barnes_g: argument must be positive, got " + std::to_string(x));
    // small integers: G(n) = prod_{j=1}^{n-1} Gamma(j), exact through lgamma
    if (x == std::floor(x) && x <= kBarnesShift) {
        double s = 0.0;
        for (int j = 1; j < static_cast<int>(x); ++j) s += log_gamma(j);
        return s;
    }
    double shift = 0.0;
    while (x < kBarnesShift) {
        shift += log_gamma(x);
        x += 1.0;
    }
    return barnes_asymptotic(x - 1.0) - shift;
}

double log_binomial(long n, long k) {
    if (n < 0 || k < 0 || k > n)
        throw DomainError("log_binomial: need 0 <= k <= n, got n=" + std::to_string(n) + " k=" + std::to_string(k));
    k = std::min(k, n - k);
    // exact integer path while C(n,k) fits in 53 bits
    std::uint64_t c = 1;
    bool exact = true;
    for (long i = 1; i <= k; ++i) {
        const std::uint64_t num = static_cast<std::uint64_t>(n - k + i);
        if (c > (std::uint64_t{1} << 53) / num) {
            exact = false;
            break;
        }
        c = c * num / static_cast<std::uint64_t>(i);
    }
    if (exact) return std::log(static_cast<double>(c));
    return log_gamma(n + 1.0) - log_gamma(k + 1.0) - log_gamma(n - k + 1.0);
}

double log_sum_exp(const double* v, std::size_t n) {
    if (n == 0) return -std::numeric_limits<double>::infinity();
    const double m = *std::max_element(v, v + n);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::exp(v[i] - m);
    return m + std::log(s);
}

} // namespace cpm
