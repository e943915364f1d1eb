#include "cpm/harness.hpp"

#include "cpm/asymptotics.hpp"
#include "cpm/constants.hpp"
#include "cpm/densities.hpp"
#include "cpm/dualexact.hpp"
#include "cpm/errors.hpp"
#include "cpm/sampler.hpp"
#include "cpm/speclog.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace cpm::harness {

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(4);
    os << x;
    return os.str();
}

// Runs body, which fills residual/detail and may set an extra pass condition; applies tolerance and budget.
template <class F>
CheckResult timed(std::string id, std::string description, double tolerance, double budget_s, F&& body) {
    CheckResult c;
    c.id = std::move(id);
    c.description = std::move(description);
    c.tolerance = tolerance;
    c.budget_s = budget_s;
    bool extra_ok = true;
    const auto t0 = Clock::now();
    try {
        body(c, extra_ok);
        c.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        c.passed = extra_ok && c.residual < tolerance && (budget_s <= 0 || c.seconds < budget_s);
        if (budget_s > 0 && c.seconds >= budget_s) c.detail += (c.detail.empty() ? "" : "; ") + std::string("over runtime budget");
    } catch (const std::exception& e) {
        c.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        c.residual = INFINITY;
        c.passed = false;
        c.detail = std::string("exception: ") + e.what();
    }
    return c;
}

double rel_log(double a, double b) { return std::fabs(std::expm1(a - b)); }

struct GateFamily {
    EnsembleSpec (*make)(double beta, int N);
    std::vector<double> lams;
};

// Gate families with fixed non-trivial parameters and three interior points each.
std::vector<GateFamily> gate_families() {
    return {
        {[](double b, int N) { return EnsembleSpec::gaussian(b, N); }, {-0.4, 0.1, 0.6}},
        {[](double b, int N) { return EnsembleSpec::laguerre_fixed(b, N, 0.7); }, {0.2, 0.5, 0.8}},
        {[](double b, int N) { return EnsembleSpec::laguerre_scaled(b, N, 1.0); }, {0.8, 2.5, 4.5}},
        {[](double b, int N) { return EnsembleSpec::jacobi_fixed(b, N, 0.6, 1.3); }, {0.25, 0.5, 0.7}},
        {[](double b, int N) { return EnsembleSpec::jacobi_scaled(b, N, 1.0, 0.5); }, {0.2, 0.45, 0.8}},
    };
}

std::vector<EnsembleSpec> beta2_families(int N) {
    return {EnsembleSpec::gaussian(2.0, N), EnsembleSpec::laguerre_fixed(2.0, N, 0.7),
            EnsembleSpec::laguerre_scaled(2.0, N, 1.3), EnsembleSpec::jacobi_fixed(2.0, N, 0.6, 1.3),
            EnsembleSpec::jacobi_scaled(2.0, N, 1.0, 0.5)};
}

std::vector<double> interior_points(const EnsembleSpec& s, int k) {
    const SpectralSupport sup = limiting_support(s);
    std::vector<double> v;
    for (int i = 1; i <= k; ++i) v.push_back(sup.lower + sup.width() * i / (k + 1.0));
    return v;
}

CheckResult criterion1(const Tolerances& tol) {
    return timed("C1", "identity: log A vs log A~ over 7 (m,n) pairs, p=1..4", tol.identity_log,
                 tol.identity_runtime_s, [&](CheckResult& c, bool& ok) {
                     for (auto [m, n] : std::vector<std::pair<int, int>>{{1, 1}, {2, 1}, {1, 2}, {3, 2}, {2, 3}, {3, 1}, {1, 3}})
                         for (int p = 1; p <= 4; ++p) {
                             const RationalBeta rb(m, n);
                             const SignedLog a = a_beta_p(rb.beta(), p), t = a_tilde(rb, p);
                             ok = ok && a.sign == t.sign && a.sign != 0;
                             c.residual = std::max(c.residual, std::fabs(a.log_abs - t.log_abs));
                         }
                     c.detail = "28 triples";
                 });
}

CheckResult criterion2(const Tolerances& tol) {
    return timed("C2", "A~ at (1,1) for p=1,2,3 equals 1, 1/12, 1/8640", tol.keating_snaith_rel,
                 tol.identity_runtime_s, [&](CheckResult& c, bool&) {
                     const double target[] = {1.0, 1.0 / 12.0, 1.0 / 8640.0};
                     std::ostringstream d;
                     for (int p = 1; p <= 3; ++p) {
                         const SignedLog t = a_tilde(RationalBeta(1, 1), p);
                         const double r = std::fabs(t.sign * std::exp(t.log_abs) / target[p - 1] - 1.0);
                         c.residual = std::max(c.residual, r);
                         d << (p > 1 ? ", " : "") << "p=" << p << ": " << fmt(r);
                     }
                     c.detail = d.str();
                 });
}

CheckResult criterion3(const Tolerances& tol, int threads) {
    return timed("C3", "duality gate: dual vs brute force, N<=3, beta in {1,2,4}, 5 families x 3 points",
                 tol.duality_rel, tol.duality_runtime_s, [&](CheckResult& c, bool&) {
                     struct Item {
                         EnsembleSpec s;
                         double lam;
                     };
                     std::vector<Item> items;
                     for (const auto& f : gate_families())
                         for (double b : {1.0, 2.0, 4.0})
                             for (int N : {1, 2, 3})
                                 for (double l : f.lams) items.push_back({f.make(b, N), l});
                     std::vector<double> res(items.size());
                     parallel_indices(items.size(), threads, [&](std::size_t i) {
                         const double d = dual_moment_p1(items[i].s, items[i].lam).log_abs;
                         const double bf = brute_force_moment(items[i].s, {items[i].lam, 1}).log_abs;
                         res[i] = rel_log(d, bf);
                     });
                     const auto it = std::max_element(res.begin(), res.end());
                     c.residual = *it;
                     const Item& w = items[it - res.begin()];
                     c.detail = std::to_string(items.size()) + " cases; worst " + family_name(w.s.family) +
                                " beta=" + fmt(w.s.beta) + " N=" + std::to_string(w.s.N) + " lambda=" + fmt(w.lam);
                 });
}

CheckResult criterion4(const Tolerances& tol, int threads) {
    return timed("C4", "remainder-order scans: Gaussian lambda=0.3 p=1, slope vs -min(2/beta,1)",
                 tol.slope_halfwidth, tol.scan_runtime_s, [&](CheckResult& c, bool&) {
                     std::ostringstream d;
                     for (double b : {1.0, 2.0, 4.0}) {
                         std::vector<int> ladder = {8, 16, 32, 64, 128};
                         if (b != 4.0) ladder.push_back(256);
                         const ScanResult s =
                             error_scan(EnsembleSpec::gaussian(b, 8), {0.3, 1}, ladder, tol.drop_rel_error, threads);
                         const double dev = std::fabs(s.fitted_slope + error_exponent(b));
                         c.residual = std::max(c.residual, dev);
                         d << (b > 1 ? "; " : "") << "beta=" << b << " slope=" << fmt(s.fitted_slope) << " (se "
                           << fmt(s.slope_stderr) << ", N<=" << ladder.back()
                           << (s.dropped.empty() ? "" : ", dropped smallest N") << ")";
                     }
                     c.detail = d.str();
                 });
}

CheckResult criterion5(const Tolerances& tol, int threads) {
    return timed("C5", "beta=2 Gaussian lambda=0.3 p in {1,2}: rel error decreasing over N=16..128, small at 128",
                 tol.beta2_terminal_rel, tol.beta2_runtime_s, [&](CheckResult& c, bool& ok) {
                     const std::vector<int> ladder = {16, 32, 64, 128};
                     std::ostringstream d;
                     for (int p : {1, 2}) {
                         std::vector<double> rel(ladder.size());
                         parallel_indices(ladder.size(), threads, [&](std::size_t i) {
                             const EnsembleSpec s = EnsembleSpec::gaussian(2.0, ladder[i]);
                             rel[i] = rel_log(beta2_determinant_moment(s, {0.3, p}).log_abs,
                                              predict(s, {0.3, p}).log_value);
                         });
                         bool dec = true;
                         for (std::size_t i = 1; i < rel.size(); ++i) dec = dec && rel[i] < rel[i - 1];
                         ok = ok && dec;
                         c.residual = std::max(c.residual, rel.back());
                         d << (p > 1 ? "; " : "") << "p=" << p << " rel:";
                         for (double r : rel) d << " " << fmt(r);
                         d << (dec ? " (decreasing)" : " (NOT decreasing)");
                     }
                     c.detail = d.str();
                 });
}

CheckResult criterion6(const Tolerances& tol) {
    return timed("C6", "beta=2 cross form: cg21 coefficients vs predict, 5 families, 5 points, p in {1,2}",
                 tol.cg21_log, tol.cg21_runtime_s, [&](CheckResult& c, bool&) {
                     int n = 0;
                     for (int N : {7, 64, 500})
                         for (const EnsembleSpec& s : beta2_families(N))
                             for (double l : interior_points(s, 5))
                                 for (int p : {1, 2}) {
                                     const double a = predict(s, {l, p}).log_value;
                                     const double b = cg21_coefficients(s, {l, p}).log_value(N);
                                     c.residual = std::max(c.residual, std::fabs(a - b));
                                     ++n;
                                 }
                     c.detail = std::to_string(n) + " comparisons at N in {7, 64, 500}";
                 });
}

CheckResult criterion7(const Tolerances& tol, std::uint64_t seed, int threads) {
    return timed("C7", "Hermite identity: MC signed charpoly mean vs exact, beta in {1,2,4}, N in {2,4}, x=0.5",
                 tol.z_max, tol.hermite_runtime_s, [&](CheckResult& c, bool&) {
                     std::ostringstream d;
                     std::uint64_t k = 0;
                     for (double b : {1.0, 2.0, 4.0})
                         for (int N : {2, 4}) {
                             const SignedMCEstimate e =
                                 mc_signed_charpoly(N, b, 0.5, tol.hermite_samples, seed + 101 + k++, threads);
                             const double z = (e.mean - hermite_mean_charpoly(N, b, 0.5)) / e.std_error;
                             c.residual = std::max(c.residual, std::fabs(z));
                             d << (k > 1 ? " " : "") << "z(" << b << "," << N << ")=" << fmt(z);
                         }
                     c.detail = d.str();
                 });
}

CheckResult criterion8(const Tolerances& tol, int threads) {
    return timed("C8", "density reconstruction: Gaussian beta=2 lambda=0.2, ratio to N rho over N=16..128",
                 tol.density_ratio, tol.density_runtime_s, [&](CheckResult& c, bool& ok) {
                     const std::vector<int> ladder = {16, 32, 64, 128};
                     std::vector<double> ratio(ladder.size());
                     parallel_indices(ladder.size(), threads, [&](std::size_t i) {
                         ratio[i] = density_reconstruct(EnsembleSpec::gaussian(2.0, ladder[i]), 0.2).ratio;
                     });
                     std::ostringstream d;
                     d << "ratios:";
                     for (std::size_t i = 0; i < ratio.size(); ++i) {
                         d << " " << fmt(ratio[i]);
                         if (i > 0) ok = ok && std::fabs(ratio[i] - 1) < std::fabs(ratio[i - 1] - 1);
                     }
                     c.residual = std::fabs(ratio.back() - 1.0);
                     c.detail = d.str() + (ok ? " (approaching 1)" : " (NOT monotone)");
                 });
}

CheckResult criterion9(const Tolerances& tol, std::uint64_t seed, int threads) {
    return timed("C9", "MC vs oracle: Gaussian beta=2 N=20 lambda=0.2 p=1, |z| < z_max, rel < mc_rel, thread-invariant",
                 tol.z_max, tol.mc_runtime_s, [&](CheckResult& c, bool& ok) {
                     const EnsembleSpec s = EnsembleSpec::gaussian(2.0, 20);
                     const MomentQuery q{0.2, 1};
                     const double exact = beta2_determinant_moment(s, q).log_abs;
                     const int t2 = threads == 1 ? 2 : threads;
                     // conditional estimator carries the relative-error contract
                     const MCEstimate a = mc_moment_conditional(s, q, tol.mc_samples, seed, 1);
                     const MCEstimate b = mc_moment_conditional(s, q, tol.mc_samples, seed, t2);
                     // plain estimator must agree statistically
                     const MCEstimate pa = mc_moment(s, q, tol.mc_samples, seed, 1);
                     const MCEstimate pb = mc_moment(s, q, tol.mc_samples, seed, t2);
                     const bool same = a.log_mean == b.log_mean && a.log_mean_stderr == b.log_mean_stderr &&
                                       pa.log_mean == pb.log_mean && pa.log_mean_stderr == pb.log_mean_stderr;
                     const double z = (a.log_mean - exact) / a.log_mean_stderr;
                     const double zp = (pa.log_mean - exact) / pa.log_mean_stderr;
                     const double rel = rel_log(a.log_mean, exact), relp = rel_log(pa.log_mean, exact);
                     ok = same && rel < tol.mc_rel;
                     c.residual = std::max(std::fabs(z), std::fabs(zp));
                     c.detail = "conditional z=" + fmt(z) + " rel=" + fmt(rel) + " se=" + fmt(a.log_mean_stderr) +
                                "; plain z=" + fmt(zp) + " rel=" + fmt(relp) + " se=" + fmt(pa.log_mean_stderr) +
                                "; threads 1 vs " + std::to_string(t2) + (same ? " bit-identical" : " DIFFER");
                 });
}

CheckResult criterion10(const Tolerances& tol) {
    return timed("C10", "degenerations: LaguerreScaled alpha->0 vs rescaled MP, JacobiScaled(0,0) vs JacobiFixed(0,0)",
                 1.0, 0.0, [&](CheckResult& c, bool&) {
                     double ls = 0, js = 0;
                     for (double b : {1.0, 2.0, 4.0})
                         for (int N : {5, 64, 256})
                             for (int p : {1, 2}) {
                                 for (double l : {0.3, 1.5, 3.7}) {
                                     const double s = predict(EnsembleSpec::laguerre_scaled(b, N, 0.0), {l, p}).log_value;
                                     const double f =
                                         predict(EnsembleSpec::laguerre_fixed(b, N, 0.0), {l / 4, p}).log_value +
                                         2.0 * p * N * std::log(4.0);
                                     ls = std::max(ls, std::fabs(s - f));
                                     // continuity: extrapolated jump as alpha -> 0
                                     auto g = [&](double al) {
                                         return predict(EnsembleSpec::laguerre_scaled(b, N, al), {l, p}).log_value;
                                     };
                                     const double f0 = g(0.0);
                                     ls = std::max(ls, std::fabs(2.0 * (g(1e-8) - f0) - (g(2e-8) - f0)));
                                 }
                                 for (double l : {0.1, 0.5, 0.85})
                                     js = std::max(js, std::fabs(predict(EnsembleSpec::jacobi_scaled(b, N, 0, 0), {l, p}).log_value -
                                                                 predict(EnsembleSpec::jacobi_fixed(b, N, 0, 0), {l, p}).log_value));
                             }
                     c.residual = std::max(ls / tol.degeneration_ls, js / tol.degeneration_js);
                     c.detail = "LS residual " + fmt(ls) + " (tol " + fmt(tol.degeneration_ls) + "), JS residual " +
                                fmt(js) + " (tol " + fmt(tol.degeneration_js) + "); residual is the worst ratio to tolerance";
                 });
}

} // namespace

CheckResult run_criterion(int k, const Tolerances& tol, std::uint64_t seed, int threads) {
    switch (k) {
        case 1: return criterion1(tol);
        case 2: return criterion2(tol);
        case 3: return criterion3(tol, threads);
        case 4: return criterion4(tol, threads);
        case 5: return criterion5(tol, threads);
        case 6: return criterion6(tol);
        case 7: return criterion7(tol, seed, threads);
        case 8: return criterion8(tol, threads);
        case 9: return criterion9(tol, seed, threads);
        case 10: return criterion10(tol);
        default: throw ConfigError("acceptance criteria are numbered 1..10");
    }
}

std::vector<CheckResult> run_acceptance(const Tolerances& tol, std::uint64_t seed, int threads,
                                        const std::vector<std::string>& only) {
    std::vector<CheckResult> v;
    for (int k = 1; k <= 10; ++k) {
        const std::string id = "C" + std::to_string(k);
        if (only.empty() || std::find(only.begin(), only.end(), id) != only.end())
            v.push_back(run_criterion(k, tol, seed, threads));
    }
    return v;
}

// ---------------------------------------------------------------- module invariants

std::vector<CheckResult> run_invariants(const Tolerances& tol, std::uint64_t seed, int threads,
                                        const std::vector<std::string>& only) {
    std::vector<CheckResult> v;
    const auto want = [&](const char* id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };

    if (want("speclog.barnes")) v.push_back(timed("speclog.barnes", "log G(x+1) - log G(x) - log Gamma(x) on a grid", tol.speclog_rel * 100, 0,
                      [&](CheckResult& c, bool&) {
                          for (double x = 0.05; x < 40; x *= 1.37)
                              c.residual = std::max(c.residual, std::fabs(log_barnes_g(x + 1) - log_barnes_g(x) -
                                                                          log_gamma(x)) /
                                                                    std::max(1.0, std::fabs(log_barnes_g(x + 1))));
                          const double vals[] = {1.0, 2.0, -3.0, 4.5};
                          const double lse = log_sum_exp(vals, 4);
                          double ref = 0;
                          for (double x : vals) ref += std::exp(x);
                          c.residual = std::max(c.residual, std::fabs(lse - std::log(ref)));
                      }));

    if (want("constants.forms")) v.push_back(timed("constants.forms", "A_{beta,p} vs gamma-ratio form; Gauss multiplication formula", 1e-10, 0,
                      [&](CheckResult& c, bool&) {
                          for (double b : {0.5, 1.0, 2.0, 4.0, 6.0})
                              for (int p = 1; p <= 4; ++p)
                                  c.residual = std::max(c.residual, std::fabs(a_beta_p(b, p).log_abs -
                                                                              a_beta_p_ratio_form(b, p).log_abs));
                          for (int n : {2, 3, 4})
                              for (double z : {0.3, 1.0, 2.7})
                                  c.residual = std::max(c.residual, gamma_multiplication_residual(z, n));
                      }));

    if (want("densities.normalization")) v.push_back(timed("densities.normalization", "every limiting density integrates to 1", tol.density_norm, 0,
                      [&](CheckResult& c, bool&) {
                          boost::math::quadrature::tanh_sinh<double> ts;
                          auto mass = [&](auto f, double a, double b) { return ts.integrate(f, a, b, 1e-12); };
                          c.residual = std::fabs(mass(rho_wigner, -1.0, 1.0) - 1);
                          c.residual = std::max(c.residual, std::fabs(mass(rho_mp, 0.0, 1.0) - 1));
                          c.residual = std::max(c.residual, std::fabs(mass(rho_jacobi, 0.0, 1.0) - 1));
                          for (double al : {0.0, 0.5, 3.0}) {
                              const SpectralSupport s = laguerre_scaled_support(al);
                              c.residual = std::max(
                                  c.residual,
                                  std::fabs(mass([al](double x) { return rho_laguerre_scaled(x, al); }, s.lower, s.upper) - 1));
                          }
                          for (auto [a1, a2] : std::vector<std::pair<double, double>>{{0, 0}, {1, 2}, {0.5, 0.1}}) {
                              const SpectralSupport s = jacobi_scaled_support(a1, a2);
                              c.residual = std::max(
                                  c.residual, std::fabs(mass([a1 = a1, a2 = a2](double x) { return rho_jacobi_scaled(x, a1, a2); },
                                                             s.lower, s.upper) -
                                                        1));
                          }
                      }));

    if (want("asymptotics.gaussian_example")) v.push_back(timed("asymptotics.gaussian_example", "Gaussian beta=2 p=1 lambda=0 equals ln(2N) - N(1 + ln 4)", 1e-10,
                      0, [&](CheckResult& c, bool&) {
                          for (int N : {1, 10, 100, 1000}) {
                              const double ref = std::log(2.0 * N) - N * (1 + std::log(4.0));
                              c.residual = std::max(c.residual, std::fabs(predict(EnsembleSpec::gaussian(2.0, N), {0.0, 1}).log_value - ref) /
                                                                    std::max(1.0, std::fabs(ref)));
                          }
                      }));

    if (want("dualexact.saddle")) v.push_back(timed("dualexact.saddle", "saddle residual |f'(u+-)| and |f''| = R at random points", tol.saddle_residual,
                      0, [&](CheckResult& c, bool&) {
                          std::mt19937_64 rng(seed);
                          for (const auto& f : gate_families())
                              for (double b : {1.0, 2.0, 4.0})
                                  for (int p : {1, 2}) {
                                      const EnsembleSpec s = f.make(b, 40);
                                      const SpectralSupport sup = limiting_support(s);
                                      std::uniform_real_distribution<double> U(sup.lower + 0.02 * sup.width(),
                                                                               sup.upper - 0.02 * sup.width());
                                      for (int k = 0; k < 5; ++k) {
                                          const double l = U(rng);
                                          const SaddleData sd = saddle(s, p, l);
                                          const PhaseFunction ph(s, p, l);
                                          for (cplx u : {sd.u_plus, sd.u_minus}) {
                                              c.residual = std::max(c.residual, std::abs(ph.d1(u)));
                                              c.residual = std::max(c.residual, std::fabs(std::abs(ph.d2(u)) - sd.R) /
                                                                                    std::max(1.0, sd.R));
                                          }
                                      }
                                  }
                      }));

    if (want("dualexact.two_paths")) v.push_back(timed("dualexact.two_paths", "beta=2 p=1: determinant vs dual quadrature, N in {2,7,16}",
                      tol.two_path_rel, 0, [&](CheckResult& c, bool&) {
                          struct Item {
                              EnsembleSpec s;
                              double l;
                          };
                          std::vector<Item> items;
                          for (int N : {2, 7, 16})
                              for (const EnsembleSpec& s : beta2_families(N))
                                  for (double l : interior_points(s, 3)) items.push_back({s, l});
                          std::vector<double> r(items.size());
                          parallel_indices(items.size(), threads, [&](std::size_t i) {
                              r[i] = std::fabs(beta2_determinant_moment(items[i].s, {items[i].l, 1}).log_abs -
                                               dual_moment_p1(items[i].s, items[i].l).log_abs);
                          });
                          c.residual = *std::max_element(r.begin(), r.end());
                      }));

    if (want("sampler.eigen")) v.push_back(timed("sampler.eigen", "implicit QL eigenvalues: trace and Frobenius invariants of random tridiagonals",
                      1e-11, 0, [&](CheckResult& c, bool&) {
                          std::mt19937_64 rng(seed + 1);
                          std::normal_distribution<double> nd;
                          for (int n : {2, 10, 100}) {
                              TridiagonalMatrix T;
                              double tr = 0, fro = 0;
                              for (int i = 0; i < n; ++i) {
                                  T.diag.push_back(nd(rng));
                                  tr += T.diag.back();
                                  fro += T.diag.back() * T.diag.back();
                              }
                              for (int i = 0; i + 1 < n; ++i) {
                                  T.offdiag.push_back(std::fabs(nd(rng)));
                                  fro += 2 * T.offdiag.back() * T.offdiag.back();
                              }
                              const auto e = eigen_tridiagonal(T);
                              double s1 = 0, s2 = 0;
                              for (double x : e) s1 += x, s2 += x * x;
                              c.residual = std::max({c.residual, std::fabs(s1 - tr) / n, std::fabs(s2 - fro) / fro});
                              if (!std::is_sorted(e.begin(), e.end())) c.residual = INFINITY;
                          }
                      }));

    if (want("sampler.mapping_gate")) v.push_back(timed("sampler.mapping_gate",
                      "matrix models vs brute force at N<=3 (90 cases; |z|<4.5, at most 2 beyond z_max)", 4.5, 0,
                      [&](CheckResult& c, bool& ok) {
                          int over = 0;
                          const std::vector<std::vector<double>> lams = {{-0.4, 0.6}, {0.2, 0.8}, {0.8, 4.5}, {0.25, 0.7}, {0.2, 0.8}};
                          const auto fams = gate_families();
                          for (double b : {1.0, 2.0, 4.0})
                              for (int N : {1, 2, 3})
                                  for (std::size_t f = 0; f < fams.size(); ++f)
                                      for (double l : lams[f]) {
                                          const EnsembleSpec s = fams[f].make(b, N);
                                          const MCEstimate m = mc_moment(s, {l, 1}, 100000, 1000 + 7 * N + f, threads);
                                          const double z = (m.log_mean - brute_force_moment(s, {l, 1}).log_abs) /
                                                           m.log_mean_stderr;
                                          c.residual = std::max(c.residual, std::fabs(z));
                                          over += std::fabs(z) >= tol.z_max;
                                      }
                          ok = over <= 2;
                          c.detail = std::to_string(over) + " cases beyond z_max";
                      }));

    if (want("harness.round_trip")) v.push_back(timed("harness.round_trip", "CSV and JSON reports re-emit byte-identically", 0.5, 0,
                      [&](CheckResult& c, bool&) {
                          ExperimentConfig cfg;
                          cfg.command = "predict";
                          cfg.N = {10, 100};
                          cfg.lambda = {-0.3, 0.1, 0.7};
                          const Report r = cmd_predict(cfg);
                          const std::string a = emit_csv(r), b = emit_json(r);
                          c.residual = (emit_csv(parse_csv(a)) != a) + (emit_json(parse_json(b)) != b);
                      }));
    return v;
}

} // namespace cpm::harness
