#include "cpm/dualexact.hpp"

#include "cpm/errors.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <functional>
#include <map>
#include <tuple>
#include <string>

namespace cpm {

namespace {

using boost::math::quadrature::exp_sinh;
using boost::math::quadrature::sinh_sinh;
using boost::math::quadrature::tanh_sinh;

constexpr double kInnerTol = 1e-9;
constexpr double kOuterTol = 1e-8;
constexpr int kMaxLevels = 3;

// Node tables are expensive to build; keep one rule per nesting level and thread.
// Inner levels get few refinements: near-degenerate intervals are rounding-limited and would otherwise
// refine to the maximum at every node of the enclosing level.
constexpr std::size_t kInnerRefinements = 6;

struct Rules {
    tanh_sinh<double> ts[kMaxLevels] = {tanh_sinh<double>(), tanh_sinh<double>(kInnerRefinements),
                                        tanh_sinh<double>(kInnerRefinements)};
    exp_sinh<double> es[kMaxLevels] = {exp_sinh<double>(), exp_sinh<double>(kInnerRefinements),
                                       exp_sinh<double>(kInnerRefinements)};
    sinh_sinh<double> ss;
};

Rules& rules() {
    thread_local Rules r;
    return r;
}

// Nested ordered integral N! int_{y_1 < ... < y_N} prod w(y_i) prod_{i<j} (y_j - y_i)^beta prod |lam - y_i|^{2p}
// in a scaled variable where the weight has unit width.
class OrderedIntegral {
public:
    OrderedIntegral(ClassicalWeight::Kind kind, double a1, double a2, double beta, int N, double lam, int twop)
        : kind_(kind), a1_(a1), a2_(a2), beta_(beta), N_(N), lam_(lam), twop_(twop), x_(N) {}

    double run(double* rel_err) {
        err_ = 0.0;
        const double v = level(0, rel_err);
        return v;
    }

private:
    ClassicalWeight::Kind kind_;
    double a1_, a2_, beta_;
    int N_;
    double lam_;
    int twop_;
    std::vector<double> x_;
    double err_ = 0.0;

    // log weight at y, given the exact distance to 1 for the Jacobi case
    double weight(double y, double one_minus_y) const {
        if (kind_ != ClassicalWeight::Kind::Hermite && !(y > 0.0)) return 0.0;
        switch (kind_) {
        case ClassicalWeight::Kind::Hermite: return std::exp(-y * y);
        case ClassicalWeight::Kind::Laguerre: return std::pow(y, a1_) * std::exp(-y);
        case ClassicalWeight::Kind::Jacobi: return std::pow(y, a1_) * std::pow(one_minus_y, a2_);
        }
        return 0.0;
    }

    // integrand factor of variable k at value y; left_gap is the exact y - x_{k-1}
    double factor(int k, double y, double left_gap, double one_minus_y) const {
        double f = weight(y, one_minus_y);
        for (int i = 0; i < k; ++i) {
            const double gap = (i == k - 1) ? left_gap : y - x_[i];
            f *= std::pow(gap, beta_);
        }
        if (twop_ > 0) f *= std::pow(std::fabs(lam_ - y), twop_);
        return f;
    }

    double level(int k, double* rel_err) {
        const double tol = (k == 0) ? kOuterTol : kInnerTol;
        double err = 0.0, L1 = 0.0;
        auto body = [&](double y, double left_gap, double one_minus_y) {
            if (!std::isfinite(y)) return 0.0;
            x_[k] = y;
            const double f = factor(k, y, left_gap, one_minus_y);
            if (!(f > 0.0) || !std::isfinite(f) || k + 1 == N_) return std::isfinite(f) ? f : 0.0;
            return f * level(k + 1, nullptr);
        };
        double Q = 0.0;
        if (kind_ == ClassicalWeight::Kind::Jacobi) {
            const double lo = (k == 0) ? 0.0 : x_[k - 1];
            if (!(lo < 1.0)) return 0.0;
            Q = rules().ts[k].integrate(
                [&](double y, double yc) {
                    const double left = yc <= 0.0 ? -yc : y - lo;
                    const double right = yc > 0.0 ? yc : 1.0 - y;
                    return body(y, left, right);
                },
                lo, 1.0, tol, &err, &L1);
        } else if (kind_ == ClassicalWeight::Kind::Laguerre || k > 0) {
            // exp_sinh clusters nodes at the endpoint; split at the weight mode when the bulk is far from it
            const double lo = (k == 0) ? 0.0 : x_[k - 1];
            const double mode = kind_ == ClassicalWeight::Kind::Laguerre ? a1_ : 0.0;
            double from = lo;
            if (mode - lo > 1.0) {
                Q = rules().ts[k].integrate(
                    [&](double y, double yc) { return body(y, yc <= 0.0 ? -yc : y - lo, 0.0); }, lo, mode, tol, &err,
                    &L1);
                from = mode;
            }
            double err2 = 0.0;
            Q += rules().es[k].integrate([&](double y) { return body(y, y - lo, 0.0); }, from, INFINITY, tol, &err2,
                                         &L1);
            err += err2;
        } else {
            Q = rules().ss.integrate([&](double y) { return body(y, 0.0, 0.0); }, tol, &err, &L1);
        }
        if (rel_err) *rel_err = err / std::fabs(Q);
        return Q;
    }
};

} // namespace

SignedLog brute_force_moment(const EnsembleSpec& spec, const MomentQuery& q) {
    spec.validate();
    if (spec.N > 3) throw DomainError("brute_force_moment supports N <= 3");
    if (q.p < 1 || q.p > 2) throw DomainError("brute_force_moment supports p in {1, 2}");
    const ClassicalWeight w = classical_weight(spec);
    // Scale y = s x so the weight becomes exp(-y^2), y^a exp(-y) or stays on (0,1).
    double s = 1.0, a1 = 0.0, a2 = 0.0;
    switch (w.kind) {
    case ClassicalWeight::Kind::Hermite: s = std::sqrt(w.kappa); break;
    case ClassicalWeight::Kind::Laguerre:
        s = w.b;
        a1 = w.a;
        break;
    case ClassicalWeight::Kind::Jacobi:
        a1 = w.a1;
        a2 = w.a2;
        break;
    }
    const int N = spec.N;
    double e_num = 0.0, e_den = 0.0;
    OrderedIntegral num(w.kind, a1, a2, spec.beta, N, s * q.lam, 2 * q.p);
    const double vn = num.run(&e_num);
    // The normalization does not depend on lam; cache it per weight.
    using Key = std::tuple<int, double, double, double, int>;
    thread_local std::map<Key, std::pair<double, double>> den_cache;
    const Key key{static_cast<int>(w.kind), a1, a2, spec.beta, N};
    auto it = den_cache.find(key);
    if (it == den_cache.end()) {
        OrderedIntegral den(w.kind, a1, a2, spec.beta, N, 0.0, 0);
        const double vd0 = den.run(&e_den);
        it = den_cache.emplace(key, std::make_pair(vd0, e_den)).first;
    }
    const double vd = it->second.first;
    e_den = it->second.second;
    if (!(vn > 0.0) || !(vd > 0.0) || !std::isfinite(vn) || !std::isfinite(vd))
        throw ConvergenceError("brute_force_moment: nonpositive or nonfinite integral");
    if (e_num > 1e-7 || e_den > 1e-7)
        throw ConvergenceError("brute_force_moment: quadrature error estimate " + std::to_string(std::max(e_num, e_den)) +
                               " exceeds 1e-7");
    // |lam - x| = |s lam - y| / s
    return SignedLog::from_log(std::log(vn) - std::log(vd) - 2.0 * q.p * N * std::log(s));
}

} // namespace cpm
