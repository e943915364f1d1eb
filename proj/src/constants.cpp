#include "cpm/constants.hpp"

#include "cpm/errors.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace cpm {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive_int(int v, const char* what) {
    if (v < 1) throw DomainError(std::string(what) + " must be a positive integer");
}

void require_positive(double v, const char* what) {
    if (!(v > 0.0)) throw DomainError(std::string(what) + " must be positive");
}

double lg(double x, const char* where) {
    if (!(x > 0.0)) throw DomainError(std::string(where) + ": nonpositive gamma argument " + std::to_string(x));
    return log_gamma(x);
}

double lG(double x, const char* where) {
    if (!(x > 0.0)) throw DomainError(std::string(where) + ": nonpositive Barnes G argument " + std::to_string(x));
    return log_barnes_g(x);
}

} // namespace

RationalBeta::RationalBeta(int m_, int n_) : m(m_), n(n_) {
    if (m < 1 || n < 1) throw DomainError("RationalBeta: m and n must be positive");
    if (std::gcd(m, n) != 1) throw DomainError("RationalBeta: m and n must be coprime");
}

SignedLog a_beta_p(double beta, int p) {
    require_positive(beta, "beta");
    require_positive_int(p, "p");
    double s = log_binomial(2 * p, p);
    for (int j = 1; j <= p; ++j) s += lg(1.0 + 2.0 * j / beta, "a_beta_p") - lg(1.0 + 2.0 * (j + p) / beta, "a_beta_p");
    return SignedLog::from_log(s);
}

SignedLog a_beta_p_ratio_form(double beta, int p) {
    require_positive(beta, "beta");
    require_positive_int(p, "p");
    double s = 0.0;
    for (int j = 1; j <= p; ++j) s += lg(2.0 * j / beta, "a_beta_p") - lg(2.0 * (j + p) / beta, "a_beta_p");
    return SignedLog::from_log(s);
}

SignedLog a_tilde(const RationalBeta& rb, int p) {
    require_positive_int(p, "p");
    const int m = rb.m, n = rb.n;
    const double mn = static_cast<double>(m) * n;
    // 2p^2/beta = p^2 n / m
    double s = -(static_cast<double>(p) * p * n / m) * std::log(static_cast<double>(n));
    for (int nu = 0; nu < n; ++nu) {
        for (int mu = 0; mu < m; ++mu) {
            const double base = static_cast<double>(nu * m - mu * n);  // nu/n - mu/m = base / mn
            s += 2.0 * lG((p * n + base) / mn + 1.0, "a_tilde");
            s -= lG((2.0 * p * n + base) / mn + 1.0, "a_tilde");
            s -= lG(base / mn + 1.0, "a_tilde");
        }
    }
    return SignedLog::from_log(s);
}

double gamma_product_identity_residual(double s, int m, int n, int p) {
    require_positive_int(m, "m");
    require_positive_int(n, "n");
    require_positive_int(p, "p");
    const char* where = "gamma_product_identity_residual";
    double lhs = 0.0;
    for (int j = 1; j <= p; ++j) lhs += lg(s + static_cast<double>(n) * j / m, where);

    const double e_n = -0.5 * p + s * p + (static_cast<double>(n) * p / (2.0 * m)) * (1.0 + p);
    double rhs = e_n * std::log(static_cast<double>(n)) - 0.5 * p * (n - 1) * std::log(2.0 * kPi);
    for (int l = 0; l < n; ++l) {
        const double t = (s + l) / n;
        for (int j = 1; j <= m; ++j)
            rhs += lG(t + static_cast<double>(j + p) / m, where) - lG(t + static_cast<double>(j) / m, where);
    }
    return std::fabs(lhs - rhs);
}

double gamma_multiplication_residual(double z, int n) {
    require_positive_int(n, "n");
    double lhs = 0.0;
    for (int k = 0; k < n; ++k) lhs += lg(z + static_cast<double>(k) / n, "gamma_multiplication_residual");
    const double rhs = 0.5 * (n - 1) * std::log(2.0 * kPi) + (0.5 - n * z) * std::log(static_cast<double>(n)) +
                       lg(n * z, "gamma_multiplication_residual");
    return std::fabs(lhs - rhs);
}

SignedLog gamma_n_beta(int n, double beta) {
    if (n < 0) throw DomainError("gamma_n_beta: n must be nonnegative");
    require_positive(beta, "beta");
    if (n == 0) return SignedLog::from_log(0.0);
    double s = 0.5 * n * std::log(kPi) - (static_cast<double>(n) * (n - 1) / beta) * std::log(2.0);
    const double g1 = log_gamma(1.0 + 2.0 / beta);
    for (int j = 2; j <= n; ++j) s += log_gamma(1.0 + 2.0 * j / beta) - g1;
    return SignedLog::from_log(s);
}

SignedLog selberg_gaussian(double beta_dual, int twop, int N) {
    require_positive(beta_dual, "beta_dual");
    require_positive_int(N, "N");
    if (twop < 2 || twop % 2 != 0) throw DomainError("selberg_gaussian: twop must be a positive even integer");
    const double p = twop / 2;
    const double h = beta_dual / 2.0;  // plays the role of 2/beta
    double s = -h * p * (2 * p - 1) * std::log(2.0) + p * std::log(kPi) -
               (p + h * p * (2 * p - 1)) * std::log(static_cast<double>(N));
    const double g1 = log_gamma(1.0 + h);
    for (int j = 1; j <= twop; ++j) s += log_gamma(1.0 + j * h) - g1;
    return SignedLog::from_log(s);
}

SignedLog selberg_laguerre(double a, double beta, int N) {
    require_positive(beta, "beta");
    require_positive_int(N, "N");
    const double h = beta / 2.0;
    double s = -N * (a * h + 1.0 + (N - 1) * h) * std::log(h);
    const double g1 = log_gamma(1.0 + h);
    for (int j = 0; j < N; ++j)
        s += lg(1.0 + (j + 1) * h, "selberg_laguerre") + lg(a * h + 1.0 + j * h, "selberg_laguerre") - g1;
    return SignedLog::from_log(s);
}

SignedLog morris_integral(int N, double a, double b, double lam) {
    require_positive_int(N, "N");
    require_positive(lam, "lam");
    const char* where = "morris_integral";
    double s = 0.0;
    const double g1 = lg(1.0 + lam, where);
    for (int j = 0; j < N; ++j) {
        s += lg(lam * j + a + b + 1.0, where) + lg(lam * (j + 1) + 1.0, where);
        s -= lg(lam * j + a + 1.0, where) + lg(lam * j + b + 1.0, where) + g1;
    }
    return SignedLog::from_log(s);
}

SignedLog selberg_jacobi(int N, double l1, double l2, double lam) {
    require_positive_int(N, "N");
    require_positive(lam, "lam");
    const char* where = "selberg_jacobi";
    double s = 0.0;
    const double g1 = lg(1.0 + lam, where);
    for (int j = 0; j < N; ++j) {
        s += lg(l1 + 1.0 + j * lam, where) + lg(l2 + 1.0 + j * lam, where) + lg(1.0 + (j + 1) * lam, where);
        s -= lg(l1 + l2 + 2.0 + (N + j - 1) * lam, where) + g1;
    }
    return SignedLog::from_log(s);
}

SignedLog partition_gaussian(double beta, int N, double kappa) {
    require_positive(beta, "beta");
    require_positive(kappa, "kappa");
    if (N < 0) throw DomainError("partition_gaussian: N must be nonnegative");
    if (N == 0) return SignedLog::from_log(0.0);
    const double h = beta / 2.0;
    const double pairs = 0.5 * N * (N - 1.0);
    double s = -h * pairs * std::log(2.0) + 0.5 * N * std::log(kPi) - (0.5 * N + h * pairs) * std::log(kappa);
    const double g1 = log_gamma(1.0 + h);
    for (int j = 1; j <= N; ++j) s += log_gamma(1.0 + j * h) - g1;
    return SignedLog::from_log(s);
}

SignedLog partition_laguerre(double beta, int N, double a, double b) {
    require_positive(beta, "beta");
    require_positive(b, "b");
    if (N < 0) throw DomainError("partition_laguerre: N must be nonnegative");
    if (N == 0) return SignedLog::from_log(0.0);
    const double h = beta / 2.0;
    double s = -(N * (a + 1.0) + beta * 0.5 * N * (N - 1.0)) * std::log(b);
    const double g1 = log_gamma(1.0 + h);
    for (int j = 0; j < N; ++j)
        s += lg(a + 1.0 + j * h, "partition_laguerre") + log_gamma(1.0 + (j + 1) * h) - g1;
    return SignedLog::from_log(s);
}

SignedLog partition_jacobi(double beta, int N, double a1, double a2) {
    if (N < 0) throw DomainError("partition_jacobi: N must be nonnegative");
    if (N == 0) return SignedLog::from_log(0.0);
    return selberg_jacobi(N, a1, a2, beta / 2.0);
}

} // namespace cpm
