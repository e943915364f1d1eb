#include "cpm/sampler.hpp"

#include "cpm/errors.hpp"

#include <boost/random/beta_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <string>
#include <thread>

namespace cpm {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// chi_k = sqrt(2 Gamma(k/2)), exact rejection sampling of the gamma variate
double chi(double k, std::mt19937_64& rng) {
    if (!(k > 0.0)) throw DomainError("chi distribution needs positive degrees of freedom, got " + std::to_string(k));
    boost::random::gamma_distribution<double> g(0.5 * k, 1.0);
    return std::sqrt(2.0 * g(rng));
}

// Beta on [-1, 1] with density proportional to (1-x)^{s-1} (1+x)^{t-1}
double beta_pm1(double s, double t, std::mt19937_64& rng) {
    if (!(s > 0.0) || !(t > 0.0)) throw DomainError("Beta parameters must be positive");
    boost::random::beta_distribution<double> B(t, s);
    return 2.0 * B(rng) - 1.0;
}

TridiagonalMatrix hermite_model(int N, double beta, std::mt19937_64& rng) {
    // spectrum density proportional to |Delta|^beta exp(-sum x^2 / 2)
    TridiagonalMatrix T;
    T.diag.resize(N);
    T.offdiag.resize(N > 0 ? N - 1 : 0);
    boost::random::normal_distribution<double> nd(0.0, 1.0);
    for (int i = 0; i < N; ++i) T.diag[i] = nd(rng);  // N(0, 2) / sqrt(2)
    for (int i = 0; i + 1 < N; ++i) T.offdiag[i] = chi(beta * (N - 1 - i), rng) / std::sqrt(2.0);
    return T;
}

TridiagonalMatrix laguerre_model(int N, double beta, double A, std::mt19937_64& rng) {
    // B B^T with B lower bidiagonal; spectrum density proportional to |Delta|^beta prod x^A exp(-x / 2)
    const double ap = A + 1.0 + 0.5 * beta * (N - 1);
    std::vector<double> d(N), s(N > 0 ? N - 1 : 0);
    for (int i = 0; i < N; ++i) d[i] = chi(2.0 * ap - beta * i, rng);
    for (int i = 0; i + 1 < N; ++i) s[i] = chi(beta * (N - 1 - i), rng);
    TridiagonalMatrix T;
    T.diag.resize(N);
    T.offdiag.resize(s.size());
    for (int i = 0; i < N; ++i) T.diag[i] = d[i] * d[i] + (i > 0 ? s[i - 1] * s[i - 1] : 0.0);
    for (int i = 0; i + 1 < N; ++i) T.offdiag[i] = s[i] * d[i];
    return T;
}

TridiagonalMatrix jacobi_model(int N, double beta, double a, double b, std::mt19937_64& rng) {
    // Canonical-moment construction on [-2, 2]: density |Delta|^beta prod (2-x)^a (2+x)^b
    const int K = 2 * N - 1;  // alpha_0 .. alpha_{2N-2}
    std::vector<double> al(K + 3, -1.0);  // al[k + 2] = alpha_k, alpha_{-2} = alpha_{-1} = alpha_{2N-1} = -1
    for (int k = 0; k < K; ++k) {
        double s, t;
        if (k % 2 == 0) {
            s = (2.0 * N - k - 2) * beta / 4.0 + a + 1.0;
            t = (2.0 * N - k - 2) * beta / 4.0 + b + 1.0;
        } else {
            s = (2.0 * N - k - 3) * beta / 4.0 + a + b + 2.0;
            t = (2.0 * N - k - 1) * beta / 4.0;
        }
        al[k + 2] = beta_pm1(s, t, rng);
    }
    auto alpha = [&](int k) { return al[k + 2]; };
    TridiagonalMatrix T;
    T.diag.resize(N);
    T.offdiag.resize(N - 1);
    for (int k = 0; k < N; ++k)
        T.diag[k] = (1.0 - alpha(2 * k - 1)) * alpha(2 * k) - (1.0 + alpha(2 * k - 1)) * alpha(2 * k - 2);
    for (int k = 0; k + 1 < N; ++k)
        T.offdiag[k] = std::sqrt(std::max(
            0.0, (1.0 - alpha(2 * k - 1)) * (1.0 - alpha(2 * k) * alpha(2 * k)) * (1.0 + alpha(2 * k + 1))));
    return T;
}

int resolve_threads(int threads, long n) {
    int t = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    return static_cast<int>(std::max(1L, std::min<long>(t, n)));
}

// Runs body(i) for i in [0, n) on contiguous chunks; body writes only to slot i.
template <class F>
void parallel_for(long n, int threads, F body) {
    const int T = resolve_threads(threads, n);
    if (T == 1) {
        for (long i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(T);
    for (int t = 0; t < T; ++t) {
        const long lo = n * t / T, hi = n * (t + 1) / T;
        pool.emplace_back([&, t, lo, hi] {
            try {
                for (long i = lo; i < hi; ++i) body(i);
            } catch (...) {
                errs[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

} // namespace

std::vector<double> eigen_tridiagonal(const TridiagonalMatrix& T) {
    const int n = static_cast<int>(T.diag.size());
    if (n < 1) throw DomainError("eigen_tridiagonal: empty matrix");
    if (static_cast<int>(T.offdiag.size()) != n - 1) throw DomainError("eigen_tridiagonal: offdiag must have N-1 entries");
    std::vector<double> d = T.diag, e(n, 0.0);
    for (int i = 0; i + 1 < n; ++i) e[i] = T.offdiag[i];
    constexpr int kMaxIter = 60;
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
                if (std::fabs(e[m]) <= DBL_EPSILON * dd) break;
            }
            if (m == l) break;
            if (++iter > kMaxIter) throw ConvergenceError("eigen_tridiagonal: QL iteration did not converge");
            // Wilkinson shift from the leading 2x2 block
            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = std::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
            double s = 1.0, c = 1.0, p = 0.0;
            int i;
            bool deflated = false;
            for (i = m - 1; i >= l; --i) {
                const double f = s * e[i];
                const double b = c * e[i];
                r = std::hypot(f, g);
                e[i + 1] = r;
                if (r == 0.0) {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if (deflated) continue;
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        } while (m != l);
    }
    std::sort(d.begin(), d.end());
    return d;
}

std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(index + 0x632BE59BD9B4E019ULL)));
}

TridiagonalMatrix sample_matrix_model(const EnsembleSpec& spec, std::mt19937_64& rng) {
    spec.validate();
    const ClassicalWeight w = classical_weight(spec);
    switch (w.kind) {
    case ClassicalWeight::Kind::Hermite: return hermite_model(spec.N, spec.beta, rng);
    case ClassicalWeight::Kind::Laguerre:
        if (!(w.a > -1.0)) throw DomainError("Laguerre exponent must exceed -1");
        return laguerre_model(spec.N, spec.beta, w.a, rng);
    case ClassicalWeight::Kind::Jacobi:
        if (!(w.a1 > -1.0) || !(w.a2 > -1.0)) throw DomainError("Jacobi exponents must exceed -1");
        // (2 - y)^{a2} (2 + y)^{a1} with x = (2 + y) / 4
        return jacobi_model(spec.N, spec.beta, w.a2, w.a1, rng);
    }
    throw DomainError("unknown weight kind");
}

std::vector<double> sample_spectrum(const EnsembleSpec& spec, std::mt19937_64& rng) {
    const ClassicalWeight w = classical_weight(spec);
    std::vector<double> x = eigen_tridiagonal(sample_matrix_model(spec, rng));
    switch (w.kind) {
    case ClassicalWeight::Kind::Hermite: {
        // exp(-y^2/2) -> exp(-kappa x^2)
        const double s = 1.0 / std::sqrt(2.0 * w.kappa);
        for (double& v : x) v *= s;
        break;
    }
    case ClassicalWeight::Kind::Laguerre: {
        // exp(-y/2) -> exp(-b x)
        const double s = 1.0 / (2.0 * w.b);
        for (double& v : x) v = std::max(v, 0.0) * s;
        break;
    }
    case ClassicalWeight::Kind::Jacobi:
        for (double& v : x) v = std::clamp((2.0 + v) / 4.0, 0.0, 1.0);
        break;
    }
    return x;
}

std::vector<double> sample_spectrum(const EnsembleSpec& spec, std::uint64_t seed) {
    std::mt19937_64 rng = sample_rng(seed, 0);
    return sample_spectrum(spec, rng);
}

std::vector<double> mc_log_samples(const EnsembleSpec& spec, const MomentQuery& q, long n_samples,
                                   std::uint64_t seed, int threads) {
    spec.validate();
    if (n_samples < 1) throw DomainError("n_samples must be positive");
    std::vector<double> out(n_samples);
    parallel_for(n_samples, threads, [&](long i) {
        std::mt19937_64 rng = sample_rng(seed, static_cast<std::uint64_t>(i));
        const std::vector<double> x = sample_spectrum(spec, rng);
        double s = 0.0;
        for (double v : x) s += std::log(std::fabs(q.lam - v));
        out[i] = 2.0 * q.p * s;
    });
    return out;
}

namespace {

MCEstimate estimate_from_logs(const std::vector<double>& l, std::uint64_t seed) {
    const long n_samples = static_cast<long>(l.size());
    const double L = *std::max_element(l.begin(), l.end());
    if (!std::isfinite(L)) throw ConvergenceError("mc_moment: non-finite sample");
    const long n = n_samples;
    // ordered reduction over sample index
    double S = 0.0, S2 = 0.0;
    for (double v : l) {
        const double w = std::exp(v - L);
        S += w;
        S2 += w * w;
    }
    MCEstimate est;
    est.n_samples = n;
    est.seed = seed;
    const double m = S / n;
    est.log_mean = L + std::log(m);
    const double var = std::max(0.0, (S2 / n - m * m) * n / (n - 1.0));
    est.log_mean_stderr = std::sqrt(var / n) / m;
    est.max_share = 1.0 / S;
    est.heavy_tail = est.max_share >= 0.5;
    // block jackknife
    const int B = static_cast<int>(std::min<long>(100, n));
    std::vector<double> theta(B);
    double tbar = 0.0;
    for (int b = 0; b < B; ++b) {
        const long lo = n * b / B, hi = n * (b + 1) / B;
        double Sb = 0.0;
        for (long i = lo; i < hi; ++i) Sb += std::exp(l[i] - L);
        theta[b] = L + std::log(std::max(S - Sb, DBL_MIN) / static_cast<double>(n - (hi - lo)));
        tbar += theta[b];
    }
    tbar /= B;
    double jv = 0.0;
    for (double t : theta) jv += (t - tbar) * (t - tbar);
    est.jackknife_stderr = std::sqrt(jv * (B - 1.0) / B);
    return est;
}

// log E[det(mu - T)^{2p} | off-diagonals] for the Hermite model with N(0,1) diagonal.
// Tracks m_i = E[D_k^i D_{k-1}^{2p-i}] through D_k = (mu - a_k) D_{k-1} - b^2 D_{k-2}.
double conditional_log_moment(double mu, int p, const std::vector<double>& offdiag, int N) {
    const int P = 2 * p;
    std::vector<double> binom((P + 1) * (P + 1), 0.0);
    for (int i = 0; i <= P; ++i) {
        binom[i * (P + 1)] = 1.0;
        for (int j = 1; j <= i; ++j) binom[i * (P + 1) + j] = binom[(i - 1) * (P + 1) + j - 1] + (j < i ? binom[(i - 1) * (P + 1) + j] : 0.0);
    }
    // E[(mu - a)^j], a ~ N(0, 1)
    std::vector<double> mom(P + 1, 0.0);
    for (int j = 0; j <= P; ++j) {
        double dfact = 1.0;  // (r - 1)!!
        for (int r = 0; r <= j; r += 2) {
            mom[j] += binom[j * (P + 1) + r] * std::pow(mu, j - r) * dfact;
            dfact *= r + 1;
        }
    }
    std::vector<double> m(P + 1, 0.0), next(P + 1);
    m[P] = 1.0;  // D_0 = 1, D_{-1} = 0
    double log_scale = 0.0;
    for (int k = 0; k < N; ++k) {
        const double c = k == 0 ? 0.0 : offdiag[k - 1] * offdiag[k - 1];
        for (int i = 0; i <= P; ++i) {
            double acc = 0.0, cp = 1.0;  // cp = (-c)^{i-j}
            for (int j = i; j >= 0; --j) {
                acc += binom[i * (P + 1) + j] * mom[j] * cp * m[j + P - i];
                cp *= -c;
            }
            next[i] = acc;
        }
        double big = 0.0;
        for (double v : next) big = std::max(big, std::fabs(v));
        if (!(big > 0.0) || !std::isfinite(big)) throw ConvergenceError("conditional moment recursion degenerated");
        for (int i = 0; i <= P; ++i) m[i] = next[i] / big;
        log_scale += std::log(big);
    }
    if (!(m[P] > 0.0)) throw ConvergenceError("conditional moment is not positive");
    return log_scale + std::log(m[P]);
}

} // namespace

MCEstimate mc_moment(const EnsembleSpec& spec, const MomentQuery& q, long n_samples, std::uint64_t seed,
                     int threads) {
    if (n_samples < 1000) throw DomainError("mc_moment needs at least 1000 samples");
    return estimate_from_logs(mc_log_samples(spec, q, n_samples, seed, threads), seed);
}

std::vector<double> mc_log_samples_conditional(const EnsembleSpec& spec, const MomentQuery& q, long n_samples,
                                               std::uint64_t seed, int threads) {
    spec.validate();
    if (spec.family != Family::GaussianGlobal)
        throw UnsupportedError("the conditional estimator needs Gaussian diagonal entries (gaussian family only)");
    if (n_samples < 1) throw DomainError("n_samples must be positive");
    if (q.p < 1) throw DomainError("p must be a positive integer");
    const ClassicalWeight w = classical_weight(spec);
    const double s = 1.0 / std::sqrt(2.0 * w.kappa);
    const int N = spec.N;
    std::vector<double> out(n_samples);
    parallel_for(n_samples, threads, [&](long i) {
        std::mt19937_64 rng = sample_rng(seed, static_cast<std::uint64_t>(i));
        std::vector<double> b(N > 0 ? N - 1 : 0);
        for (int k = 0; k + 1 < N; ++k) b[k] = chi(spec.beta * (N - 1 - k), rng) / std::sqrt(2.0);
        out[i] = 2.0 * q.p * N * std::log(s) + conditional_log_moment(q.lam / s, q.p, b, N);
    });
    return out;
}

MCEstimate mc_moment_conditional(const EnsembleSpec& spec, const MomentQuery& q, long n_samples, std::uint64_t seed,
                                 int threads) {
    if (n_samples < 1000) throw DomainError("mc_moment_conditional needs at least 1000 samples");
    return estimate_from_logs(mc_log_samples_conditional(spec, q, n_samples, seed, threads), seed);
}

SignedMCEstimate mc_signed_charpoly(int N, double beta, double x, long n_samples, std::uint64_t seed, int threads) {
    if (N < 1 || !(beta > 0.0)) throw DomainError("mc_signed_charpoly needs N >= 1 and beta > 0");
    if (n_samples < 2) throw DomainError("mc_signed_charpoly needs at least 2 samples");
    std::vector<double> v(n_samples);
    const double s = 1.0 / std::sqrt(beta);  // exp(-y^2/2) -> exp(-beta x^2 / 2)
    parallel_for(n_samples, threads, [&](long i) {
        std::mt19937_64 rng = sample_rng(seed, static_cast<std::uint64_t>(i));
        const std::vector<double> ev = eigen_tridiagonal(hermite_model(N, beta, rng));
        double prod = 1.0;
        for (double e : ev) prod *= x - s * e;
        v[i] = prod;
    });
    double S = 0.0, S2 = 0.0;
    for (double t : v) {
        S += t;
        S2 += t * t;
    }
    SignedMCEstimate est;
    est.n_samples = n_samples;
    est.seed = seed;
    est.mean = S / n_samples;
    const double var = std::max(0.0, (S2 / n_samples - est.mean * est.mean) * n_samples / (n_samples - 1.0));
    est.std_error = std::sqrt(var / n_samples);
    return est;
}

} // namespace cpm
