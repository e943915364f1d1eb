#pragma once

#include "cpm/densities.hpp"

#include <string>

namespace cpm {

enum class Family { GaussianGlobal, LaguerreFixed, LaguerreScaled, JacobiFixed, JacobiScaled };

std::string family_name(Family f);
Family parse_family(const std::string& name);  // throws DomainError on unknown names

// Weight conventions:
//   GaussianGlobal  exp(-beta N x^2)
//   LaguerreFixed   x^a exp(-2 beta N x)
//   LaguerreScaled  x^{beta N alpha / 2} exp(-beta N x / 2)
//   JacobiFixed     x^a1 (1-x)^a2 on (0,1)
//   JacobiScaled    x^{beta N alpha1 / 2} (1-x)^{beta N alpha2 / 2}
struct EnsembleSpec {
    Family family = Family::GaussianGlobal;
    double beta = 2.0;
    int N = 1;
    double param1 = 0.0;  // a, alpha, a1 or alpha1
    double param2 = 0.0;  // a2 or alpha2

    static EnsembleSpec gaussian(double beta, int N);
    static EnsembleSpec laguerre_fixed(double beta, int N, double a);
    static EnsembleSpec laguerre_scaled(double beta, int N, double alpha);
    static EnsembleSpec jacobi_fixed(double beta, int N, double a1, double a2);
    static EnsembleSpec jacobi_scaled(double beta, int N, double alpha1, double alpha2);

    EnsembleSpec with_N(int n) const;
    void validate() const;  // throws DomainError
};

struct MomentQuery {
    double lam = 0.0;
    int p = 1;
};

// The spec's weight written as one of the three classical forms.
struct ClassicalWeight {
    enum class Kind { Hermite, Laguerre, Jacobi } kind = Kind::Hermite;
    double kappa = 0.0;       // Hermite: exp(-kappa x^2)
    double a = 0.0, b = 0.0;  // Laguerre: x^a exp(-b x)
    double a1 = 0.0, a2 = 0.0;  // Jacobi: x^a1 (1-x)^a2

    double log_weight(double x) const;  // -inf outside the domain
};

ClassicalWeight classical_weight(const EnsembleSpec& spec);

// Limiting global density of the family and its support.
SpectralSupport limiting_support(const EnsembleSpec& spec);
double limiting_density(const EnsembleSpec& spec, double lam);

} // namespace cpm
