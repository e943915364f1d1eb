#include "cpm/densities.hpp"

#include "cpm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cpm {

namespace {
constexpr double kPi = std::numbers::pi;
}

double rho_wigner(double lam) {
    if (!(lam > -1.0 && lam < 1.0)) return 0.0;
    return (2.0 / kPi) * std::sqrt(1.0 - lam * lam);
}

double rho_mp(double lam) {
    if (!(lam > 0.0 && lam < 1.0)) return 0.0;
    return (2.0 / kPi) * std::sqrt(1.0 / lam - 1.0);
}

double rho_jacobi(double lam) {
    if (!(lam > 0.0 && lam < 1.0)) return 0.0;
    return 1.0 / (kPi * std::sqrt(lam * (1.0 - lam)));
}

SpectralSupport laguerre_scaled_support(double alpha) {
    if (!(alpha >= 0.0)) throw DomainError("laguerre_scaled_support: alpha must be >= 0");
    const double r = std::sqrt(alpha + 1.0);
    const double c = r - 1.0, d = r + 1.0;
    return {c * c, d * d};
}

double rho_laguerre_scaled(double lam, double alpha) {
    const SpectralSupport s = laguerre_scaled_support(alpha);
    if (!s.contains_open(lam)) return 0.0;
    const double q = 4.0 * lam - (lam - alpha) * (lam - alpha);
    return std::sqrt(std::max(q, 0.0)) / (2.0 * kPi * lam);
}

SpectralSupport jacobi_scaled_support(double a1, double a2) {
    if (!(a1 >= 0.0 && a2 >= 0.0)) throw DomainError("jacobi_scaled_support: alpha1, alpha2 must be >= 0");
    const double s2 = (a1 + a2 + 2.0) * (a1 + a2 + 2.0);
    const double sum = 1.0 + (a1 * a1 - a2 * a2) / s2;       // c1 + c2
    const double q = 2.0 * (a1 * a1 + a2 * a2) / s2 - 1.0;     // (2c1 - 1)(2c2 - 1)
    const double prod = (q + 2.0 * sum - 1.0) / 4.0;           // c1 c2
    const double disc = std::sqrt(std::max(sum * sum - 4.0 * prod, 0.0));
    // c1 = prod / c2 avoids cancellation when c1 is small
    const double c2 = 0.5 * (sum + disc);
    const double c1 = c2 > 0.0 ? prod / c2 : 0.5 * (sum - disc);
    return {std::max(c1, 0.0), std::min(c2, 1.0)};
}

double rho_jacobi_scaled(double lam, double a1, double a2) {
    const SpectralSupport s = jacobi_scaled_support(a1, a2);
    if (!s.contains_open(lam)) return 0.0;
    const double q = (lam - s.lower) * (s.upper - lam);
    return (2.0 + a1 + a2) / (2.0 * kPi) * std::sqrt(std::max(q, 0.0)) / (lam * (1.0 - lam));
}

} // namespace cpm
