#pragma once

#include <vector>

namespace cpm {

// Nodes and positive weights of a one- or two-dimensional rule.
struct QuadratureGrid {
    enum class Kind { GaussLegendre, CircleTrapezoid, TensorProduct2D };

    Kind kind = Kind::GaussLegendre;
    std::vector<double> nodes;    // 1-D: abscissae or angles; 2-D: x-coordinates
    std::vector<double> nodes_y;  // 2-D only
    std::vector<double> weights;

    std::size_t size() const { return weights.size(); }
};

// Composite 20-point Gauss-Legendre on [a, b] split into npanels equal panels.
QuadratureGrid gauss_legendre_panels(double a, double b, int npanels);

// Composite Gauss-Legendre on [0, b] with panels refined geometrically toward 0
// (ratio 0.15, nlevels levels) followed by npanels equal panels; for x^gamma factors.
QuadratureGrid gauss_legendre_graded(double b, int npanels, int nlevels);

// Equispaced rule on (-pi, pi] with weights 1/M (mean over the circle), midpoints avoid -pi.
QuadratureGrid circle_trapezoid(int M);

// Circle rule with a sigmoidal change of variables clustering nodes at angle +-pi:
// theta = -pi + 2 pi v(t), v = t^q / (t^q + (1-t)^q), midpoint nodes in t. Weights sum to 1.
QuadratureGrid circle_graded(int M, int q);

// Tensor product of two 1-D rules.
QuadratureGrid tensor_product(const QuadratureGrid& x, const QuadratureGrid& y);

} // namespace cpm
