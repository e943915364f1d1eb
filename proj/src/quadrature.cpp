#include "cpm/quadrature.hpp"

#include "cpm/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <numbers>

namespace cpm {

namespace {

constexpr double kPi = std::numbers::pi;
using GL20 = boost::math::quadrature::gauss<double, 20>;

// Append the 20-point rule on [a, b].
void append_panel(QuadratureGrid& g, double a, double b) {
    const auto& x = GL20::abscissa();  // nonnegative half, x[0] = smallest
    const auto& w = GL20::weights();
    const double h = 0.5 * (b - a), m = 0.5 * (a + b);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0.0) {
            g.nodes.push_back(m);
            g.weights.push_back(h * w[i]);
            continue;
        }
        g.nodes.push_back(m - h * x[i]);
        g.weights.push_back(h * w[i]);
        g.nodes.push_back(m + h * x[i]);
        g.weights.push_back(h * w[i]);
    }
}

} // namespace

QuadratureGrid gauss_legendre_panels(double a, double b, int npanels) {
    if (!(b > a) || npanels < 1) throw DomainError("gauss_legendre_panels: need b > a and npanels >= 1");
    QuadratureGrid g;
    g.kind = QuadratureGrid::Kind::GaussLegendre;
    for (int i = 0; i < npanels; ++i) append_panel(g, a + (b - a) * i / npanels, a + (b - a) * (i + 1) / npanels);
    return g;
}

QuadratureGrid gauss_legendre_graded(double b, int npanels, int nlevels) {
    if (!(b > 0.0) || npanels < 1 || nlevels < 0) throw DomainError("gauss_legendre_graded: invalid arguments");
    QuadratureGrid g;
    g.kind = QuadratureGrid::Kind::GaussLegendre;
    const double h = b / npanels;
    // geometric panels inside the first uniform panel
    double lo = h * std::pow(0.15, nlevels);
    if (nlevels > 0) append_panel(g, 0.0, lo);
    for (int k = nlevels - 1; k >= 0; --k) {
        const double hi = h * std::pow(0.15, k);
        append_panel(g, lo, hi);
        lo = hi;
    }
    if (nlevels == 0) append_panel(g, 0.0, h);
    for (int i = 1; i < npanels; ++i) append_panel(g, h * i, h * (i + 1));
    return g;
}

QuadratureGrid circle_trapezoid(int M) {
    if (M < 2) throw DomainError("circle_trapezoid: need at least 2 nodes");
    QuadratureGrid g;
    g.kind = QuadratureGrid::Kind::CircleTrapezoid;
    g.nodes.resize(M);
    g.weights.assign(M, 1.0 / M);
    for (int j = 0; j < M; ++j) g.nodes[j] = -kPi + 2.0 * kPi * (j + 0.5) / M;
    return g;
}

QuadratureGrid circle_graded(int M, int q) {
    if (M < 2 || q < 1) throw DomainError("circle_graded: need M >= 2 and q >= 1");
    if (q == 1) return circle_trapezoid(M);
    QuadratureGrid g;
    g.kind = QuadratureGrid::Kind::CircleTrapezoid;
    g.nodes.resize(M);
    g.weights.resize(M);
    for (int j = 0; j < M; ++j) {
        const double t = (j + 0.5) / M;
        const double a = std::pow(t, q), b = std::pow(1.0 - t, q);
        const double v = a / (a + b);
        const double dv = q * std::pow(t, q - 1) * std::pow(1.0 - t, q - 1) / ((a + b) * (a + b));
        g.nodes[j] = -kPi + 2.0 * kPi * v;
        g.weights[j] = dv / M;
    }
    return g;
}

QuadratureGrid tensor_product(const QuadratureGrid& x, const QuadratureGrid& y) {
    QuadratureGrid g;
    g.kind = QuadratureGrid::Kind::TensorProduct2D;
    g.nodes.reserve(x.size() * y.size());
    g.nodes_y.reserve(x.size() * y.size());
    g.weights.reserve(x.size() * y.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < y.size(); ++j) {
            g.nodes.push_back(x.nodes[i]);
            g.nodes_y.push_back(y.nodes[j]);
            g.weights.push_back(x.weights[i] * y.weights[j]);
        }
    return g;
}

} // namespace cpm
