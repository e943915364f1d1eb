#include "cpm/harness.hpp"

#include "cpm/asymptotics.hpp"
#include "cpm/constants.hpp"
#include "cpm/dualexact.hpp"
#include "cpm/errors.hpp"
#include "cpm/sampler.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>
#include <thread>

namespace cpm::harness {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

Json num(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

// Tolerance fields in declaration order; one place for serialization and overrides.
template <class T, class F>
void for_each_field(T& t, F&& f) {
    f("identity_log", t.identity_log);
    f("identity_runtime_s", t.identity_runtime_s);
    f("keating_snaith_rel", t.keating_snaith_rel);
    f("duality_rel", t.duality_rel);
    f("duality_runtime_s", t.duality_runtime_s);
    f("slope_halfwidth", t.slope_halfwidth);
    f("scan_runtime_s", t.scan_runtime_s);
    f("drop_rel_error", t.drop_rel_error);
    f("beta2_terminal_rel", t.beta2_terminal_rel);
    f("beta2_runtime_s", t.beta2_runtime_s);
    f("cg21_log", t.cg21_log);
    f("cg21_runtime_s", t.cg21_runtime_s);
    f("z_max", t.z_max);
    f("hermite_samples", t.hermite_samples);
    f("hermite_runtime_s", t.hermite_runtime_s);
    f("density_ratio", t.density_ratio);
    f("density_jacobi_ratio", t.density_jacobi_ratio);
    f("density_runtime_s", t.density_runtime_s);
    f("mc_samples", t.mc_samples);
    f("mc_rel", t.mc_rel);
    f("mc_runtime_s", t.mc_runtime_s);
    f("degeneration_ls", t.degeneration_ls);
    f("degeneration_js", t.degeneration_js);
    f("two_path_rel", t.two_path_rel);
    f("saddle_residual", t.saddle_residual);
    f("density_norm", t.density_norm);
    f("speclog_rel", t.speclog_rel);
}

template <class T>
T get_or(const Json& j, const char* key, const T& fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

bool is_even_integer(double b) { return b > 0 && std::floor(b) == b && std::fmod(b, 2.0) == 0.0; }

} // namespace

// ---------------------------------------------------------------- tolerances

Json Tolerances::to_json() const {
    Json j;
    j["version"] = kTolerancesVersion;
    j["profile"] = profile;
    for_each_field(*this, [&](const char* k, const auto& v) { j[k] = v; });
    return j;
}

void Tolerances::apply_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("tolerance override must be key=value: " + assignment);
    const std::string key = assignment.substr(0, eq), val = assignment.substr(eq + 1);
    bool found = false;
    for_each_field(*this, [&](const char* k, auto& v) {
        if (key != k) return;
        found = true;
        std::istringstream is(val);
        if (!(is >> v) || !is.eof() || v < 0) throw ConfigError("invalid value for tolerance " + key + ": " + val);
    });
    if (!found) throw ConfigError("unknown tolerance key: " + key);
    if (profile.find('+') == std::string::npos) profile += "+overrides";
}

Tolerances tolerance_profile(const std::string& name) {
    Tolerances t;
    if (name == "default") return t;
    if (name == "quick") {
        t.profile = "quick";
        t.hermite_samples /= 10;
        t.mc_samples /= 10;
        t.mc_rel = 0.06;
        return t;
    }
    throw ConfigError("unknown tolerance profile '" + name + "' (available: default, quick)");
}

std::vector<std::string> tolerance_profile_names() { return {"default", "quick"}; }

// ---------------------------------------------------------------- config

Json ExperimentConfig::to_json() const {
    Json j;
    j["command"] = command;
    j["family"] = family;
    j["beta"] = beta;
    j["param1"] = param1;
    j["param2"] = param2;
    j["N"] = N;
    j["p"] = p;
    j["lambda"] = lambda;
    j["samples"] = samples;
    j["seed"] = seed;
    j["threads"] = threads;
    j["format"] = format;
    j["out"] = out;
    j["tolerance_profile"] = tolerance_profile;
    j["tolerance_overrides"] = tolerance_overrides;
    j["method"] = method;
    j["triples"] = triples;
    j["suite"] = suite;
    j["checks"] = checks;
    return j;
}

void ExperimentConfig::merge_json(const Json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    static const std::vector<std::string> known = {
        "command", "family", "beta",   "param1", "param2",           "N",                   "p",
        "lambda",  "samples", "seed",  "threads", "format",          "out",                 "tolerance_profile",
        "tolerance_overrides", "method", "triples", "suite", "checks"};
    for (const auto& [k, v] : j.items())
        if (std::find(known.begin(), known.end(), k) == known.end()) throw ConfigError("unknown config key: " + k);
    command = get_or(j, "command", command);
    family = get_or(j, "family", family);
    beta = get_or(j, "beta", beta);
    param1 = get_or(j, "param1", param1);
    param2 = get_or(j, "param2", param2);
    N = get_or(j, "N", N);
    p = get_or(j, "p", p);
    lambda = get_or(j, "lambda", lambda);
    samples = get_or(j, "samples", samples);
    seed = get_or(j, "seed", seed);
    threads = get_or(j, "threads", threads);
    format = get_or(j, "format", format);
    out = get_or(j, "out", out);
    tolerance_profile = get_or(j, "tolerance_profile", tolerance_profile);
    tolerance_overrides = get_or(j, "tolerance_overrides", tolerance_overrides);
    method = get_or(j, "method", method);
    triples = get_or(j, "triples", triples);
    suite = get_or(j, "suite", suite);
    checks = get_or(j, "checks", checks);
}

ExperimentConfig ExperimentConfig::from_json(const Json& j) {
    ExperimentConfig c;
    c.merge_json(j);
    return c;
}

void ExperimentConfig::validate() const {
    static const std::vector<std::string> commands = {"predict",  "oracle",  "mc",    "error-scan",
                                                      "identity", "density", "verify"};
    if (std::find(commands.begin(), commands.end(), command) == commands.end())
        throw ConfigError("unknown command '" + command + "'");
    if (format != "csv" && format != "json") throw ConfigError("format must be csv or json, got '" + format + "'");
    if (threads < 0) throw ConfigError("threads must be >= 0 (0 = all cores)");
    tolerances();  // validates profile and overrides
    if (command == "identity") {
        for (const auto& t : triples)
            if (t[0] < 1 || t[1] < 1 || t[2] < 1) throw ConfigError("identity triples need m, n, p >= 1");
        return;
    }
    if (command == "verify") {
        if (suite != "default" && suite != "acceptance" && suite != "invariants")
            throw ConfigError("suite must be default, acceptance or invariants");
        return;
    }
    try {
        parse_family(family);
    } catch (const DomainError& e) {
        throw ConfigError(std::string(e.what()) +
                          "");
    }
    if (!(beta > 0) || !std::isfinite(beta)) throw ConfigError("beta must be positive");
    if (p < 1) throw ConfigError("p must be a positive integer");
    if (N.empty()) throw ConfigError("N list is empty");
    for (int n : N)
        if (n < 1) throw ConfigError("every N must be >= 1");
    if (lambda.empty()) throw ConfigError("lambda list is empty");
    for (double l : lambda)
        if (!std::isfinite(l)) throw ConfigError("lambda values must be finite");
    if (command == "mc" && samples < 1000) throw ConfigError("mc needs samples >= 1000");
    if (command == "mc" && method != "auto" && method != "plain" && method != "conditional")
        throw ConfigError("mc method must be auto, plain or conditional");
    if (command == "oracle" && method != "auto" && method != "determinant" && method != "dual" && method != "brute")
        throw ConfigError("oracle method must be auto, determinant, dual or brute");
    try {
        spec(N.front()).validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
}

EnsembleSpec ExperimentConfig::spec(int n) const {
    EnsembleSpec s;
    s.family = parse_family(family);
    s.beta = beta;
    s.N = n;
    s.param1 = param1;
    s.param2 = param2;
    return s;
}

Tolerances ExperimentConfig::tolerances() const {
    Tolerances t = harness::tolerance_profile(tolerance_profile);
    for (const auto& o : tolerance_overrides) t.apply_override(o);
    return t;
}

// ---------------------------------------------------------------- reports

const Json& Report::cell(std::size_t row, const std::string& column) const {
    const auto it = std::find(columns.begin(), columns.end(), column);
    if (it == columns.end()) throw std::out_of_range("no column " + column);
    return rows.at(row).at(static_cast<std::size_t>(it - columns.begin()));
}

namespace {

std::string format_double(double x) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

std::string csv_field(const Json& v) {
    if (v.is_null()) return "";
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    if (v.is_number_float()) {
        const double d = v.get<double>();
        return std::isfinite(d) ? format_double(d) : "";
    }
    std::string s = v.is_string() ? v.get<std::string>() : v.dump();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += (c == '"') ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

Json csv_value(const std::string& s, bool quoted) {
    if (quoted) return s;
    if (s.empty()) return nullptr;
    if (s == "true") return true;
    if (s == "false") return false;
    const char* b = s.data();
    const char* e = b + s.size();
    if (s.find_first_of(".eE") == std::string::npos) {
        if (s[0] == '-') {
            std::int64_t i;
            auto r = std::from_chars(b, e, i);
            if (r.ec == std::errc() && r.ptr == e) return i;
        } else {
            std::uint64_t u;
            auto r = std::from_chars(b, e, u);
            if (r.ec == std::errc() && r.ptr == e) {
                if (u <= static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
                    return static_cast<std::int64_t>(u);
                return u;
            }
        }
    }
    double d;
    auto r = std::from_chars(b, e, d);
    if (r.ec == std::errc() && r.ptr == e && std::isfinite(d)) return d;
    return s;
}

std::vector<std::pair<std::string, bool>> split_csv_line(const std::string& line) {
    std::vector<std::pair<std::string, bool>> out;
    std::string cur;
    bool quoted = false, in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_quotes) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                in_quotes = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            in_quotes = quoted = true;
        } else if (c == ',') {
            out.emplace_back(cur, quoted);
            cur.clear();
            quoted = false;
        } else {
            cur += c;
        }
    }
    out.emplace_back(cur, quoted);
    return out;
}

constexpr const char* kConfigPrefix = "# config: ";
constexpr const char* kSummaryPrefix = "# summary: ";

} // namespace

std::string emit_csv(const Report& r) {
    std::string s = kConfigPrefix + r.config.dump() + "\n" + kSummaryPrefix + r.summary.dump() + "\n";
    for (std::size_t i = 0; i < r.columns.size(); ++i) s += (i ? "," : "") + csv_field(r.columns[i]);
    s += "\n";
    for (const auto& row : r.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + csv_field(row[i]);
        s += "\n";
    }
    return s;
}

std::string emit_json(const Report& r) {
    Json j;
    j["config"] = r.config;
    j["columns"] = r.columns;
    Json rows = Json::array();
    for (const auto& row : r.rows) {
        Json o = Json::object();
        for (std::size_t i = 0; i < r.columns.size(); ++i) o[r.columns[i]] = row.at(i);
        rows.push_back(std::move(o));
    }
    j["rows"] = std::move(rows);
    j["summary"] = r.summary;
    return j.dump(2) + "\n";
}

std::string emit(const Report& r, const std::string& format) {
    if (format == "json") return emit_json(r);
    if (format == "csv") return emit_csv(r);
    throw ConfigError("format must be csv or json");
}

Report parse_csv(const std::string& text) {
    Report r;
    std::istringstream is(text);
    std::string line;
    bool header = false;
    while (std::getline(is, line)) {
        if (line.rfind(kConfigPrefix, 0) == 0) {
            r.config = Json::parse(line.substr(std::char_traits<char>::length(kConfigPrefix)));
        } else if (line.rfind(kSummaryPrefix, 0) == 0) {
            r.summary = Json::parse(line.substr(std::char_traits<char>::length(kSummaryPrefix)));
        } else if (!header) {
            for (auto& [f, q] : split_csv_line(line)) r.columns.push_back(f);
            header = true;
        } else {
            std::vector<Json> row;
            for (auto& [f, q] : split_csv_line(line)) row.push_back(csv_value(f, q));
            if (row.size() != r.columns.size()) throw ConfigError("CSV row width does not match the header");
            r.rows.push_back(std::move(row));
        }
    }
    if (!header) throw ConfigError("CSV has no header line");
    return r;
}

Report parse_json(const std::string& text) {
    const Json j = Json::parse(text);
    Report r;
    r.config = j.at("config");
    r.columns = j.at("columns").get<std::vector<std::string>>();
    for (const auto& o : j.at("rows")) {
        std::vector<Json> row;
        for (const auto& c : r.columns) row.push_back(o.at(c));
        r.rows.push_back(std::move(row));
    }
    r.summary = j.at("summary");
    return r;
}

// ---------------------------------------------------------------- parallel map

void parallel_indices(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
    std::size_t T = threads <= 0 ? std::max(1u, std::thread::hardware_concurrency()) : static_cast<std::size_t>(threads);
    T = std::min(T, std::max<std::size_t>(n, 1));
    if (T <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(T);
    for (std::size_t t = 0; t < T; ++t)
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < n; i += T) body(i);
            } catch (...) {
                errs[t] = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------- numerics

double exact_log_moment(const EnsembleSpec& spec, const MomentQuery& q, const std::string& method, std::string* used) {
    std::string m = method;
    if (m == "auto") {
        if (spec.beta == 2.0 && q.p <= 6)
            m = "determinant";
        else if (q.p == 1)
            m = "dual";
        else if (spec.N <= 3 && q.p <= 2)
            m = "brute";
        else
            throw UnsupportedError("no exact oracle for beta=" + format_double(spec.beta) + ", p=" +
                                   std::to_string(q.p) + ", N=" + std::to_string(spec.N) +
                                   " (available: beta=2 with p<=6, p=1 at any beta, or N<=3 with p<=2)");
    }
    SignedLog v;
    if (m == "determinant")
        v = beta2_determinant_moment(spec, q);
    else if (m == "dual") {
        if (q.p != 1) throw UnsupportedError("the dual oracle needs p=1");
        v = dual_moment_p1(spec, q.lam);
    } else if (m == "brute")
        v = brute_force_moment(spec, q);
    else
        throw ConfigError("unknown oracle method " + m);
    if (v.sign <= 0) throw ConvergenceError("exact oracle returned a nonpositive moment");
    if (used) *used = m;
    return v.log_abs;
}

ScanResult error_scan(const EnsembleSpec& base, const MomentQuery& q, std::vector<int> ladder, double drop_threshold,
                      int threads) {
    std::sort(ladder.begin(), ladder.end());
    ladder.erase(std::unique(ladder.begin(), ladder.end()), ladder.end());
    if (ladder.size() < 3) throw ConfigError("error-scan needs at least 3 distinct N values");
    if (!(base.beta == 2.0 && q.p <= 6) && q.p != 1)
        throw UnsupportedError("error-scan needs an exact path: beta=2 with p<=6, or p=1");
    ScanResult res;
    res.rows.resize(ladder.size());
    parallel_indices(ladder.size(), threads, [&](std::size_t i) {
        const EnsembleSpec s = base.with_N(ladder[i]);
        ScanRow& r = res.rows[i];
        r.N = ladder[i];
        r.log_exact = exact_log_moment(s, q, "auto", nullptr);
        r.log_predicted = predict(s, q).log_value;
        r.rel_error = std::fabs(std::expm1(r.log_exact - r.log_predicted));
    });
    if (res.rows.front().rel_error > drop_threshold) {
        res.rows.front().used_in_fit = false;
        res.dropped.push_back(res.rows.front().N);
    }
    for (auto& r : res.rows)
        if (r.used_in_fit && !(r.rel_error > 0)) {
            r.used_in_fit = false;
            res.dropped.push_back(r.N);
        }
    std::vector<double> x, y;
    for (const auto& r : res.rows)
        if (r.used_in_fit) {
            x.push_back(std::log(double(r.N)));
            y.push_back(std::log(r.rel_error));
        }
    const std::size_t n = x.size();
    if (n < 2) throw ConvergenceError("error-scan: fewer than two usable points");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) mx += x[i] / n, my += y[i] / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) sxx += (x[i] - mx) * (x[i] - mx), sxy += (x[i] - mx) * (y[i] - my);
    res.fitted_slope = sxy / sxx;
    const double icpt = my - res.fitted_slope * mx;
    double ssr = 0;
    for (std::size_t i = 0; i < n; ++i) ssr += std::pow(y[i] - icpt - res.fitted_slope * x[i], 2);
    res.slope_stderr = n > 2 ? std::sqrt(ssr / (n - 2) / sxx) : kNaN;
    return res;
}

DensityPoint density_reconstruct(const EnsembleSpec& spec, double lam) {
    spec.validate();
    if (!is_even_integer(spec.beta)) throw DomainError("density reconstruction needs an even integer beta");
    if (spec.beta != 2.0)
        throw UnsupportedError("density reconstruction needs an exact p=beta/2 moment; only beta=2 has one");
    const ClassicalWeight w = classical_weight(spec);
    const int N = spec.N;
    SignedLog zN, zN1;
    switch (w.kind) {
        case ClassicalWeight::Kind::Hermite:
            zN = partition_gaussian(spec.beta, N, w.kappa);
            zN1 = partition_gaussian(spec.beta, N + 1, w.kappa);
            break;
        case ClassicalWeight::Kind::Laguerre:
            zN = partition_laguerre(spec.beta, N, w.a, w.b);
            zN1 = partition_laguerre(spec.beta, N + 1, w.a, w.b);
            break;
        case ClassicalWeight::Kind::Jacobi:
            zN = partition_jacobi(spec.beta, N, w.a1, w.a2);
            zN1 = partition_jacobi(spec.beta, N + 1, w.a1, w.a2);
            break;
    }
    const double lw = w.log_weight(lam);
    if (!std::isfinite(lw)) throw SupportError("lambda is outside the weight's domain");
    const double rho = limiting_density(spec, lam);
    if (!(rho > 0)) throw SupportError("lambda is outside the limiting support");
    DensityPoint d;
    d.N = N;
    d.lambda = lam;
    d.log_rho_hat = std::log(N + 1.0) + zN.log_abs - zN1.log_abs + lw +
                    beta2_determinant_moment(spec, {lam, 1}).log_abs;
    d.ratio = std::exp(d.log_rho_hat - std::log(N * rho));
    return d;
}

// ---------------------------------------------------------------- commands

namespace {

std::vector<int> sorted(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}
std::vector<double> sorted(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

struct GridPoint {
    int N;
    double lam;
};

std::vector<GridPoint> grid(const ExperimentConfig& cfg) {
    std::vector<GridPoint> g;
    for (int n : sorted(cfg.N))
        for (double l : sorted(cfg.lambda)) g.push_back({n, l});
    return g;
}

std::vector<Json> moment_prefix(const ExperimentConfig& cfg, int N, double lam, double value_log, double stderr_log,
                                const std::string& method) {
    return {family_name(parse_family(cfg.family)), cfg.beta, N, cfg.p, lam, num(value_log), num(stderr_log),
            method, cfg.seed};
}

Report start(const ExperimentConfig& cfg, const std::vector<std::string>& extra) {
    Report r;
    r.config = cfg.to_json();
    r.columns = kMomentColumns;
    r.columns.insert(r.columns.end(), extra.begin(), extra.end());
    return r;
}

} // namespace

Report cmd_predict(const ExperimentConfig& cfg) {
    cfg.validate();
    Report r = start(cfg, {"error_exponent"});
    for (const auto& [N, lam] : grid(cfg)) {
        const Prediction pr = predict(cfg.spec(N), {lam, cfg.p});
        auto row = moment_prefix(cfg, N, lam, pr.log_value, kNaN, "predict");
        row.push_back(pr.error_exponent);
        r.rows.push_back(std::move(row));
    }
    return r;
}

Report cmd_oracle(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto g = grid(cfg);
    std::vector<double> vals(g.size());
    std::vector<std::string> methods(g.size());
    parallel_indices(g.size(), cfg.threads, [&](std::size_t i) {
        vals[i] = exact_log_moment(cfg.spec(g[i].N), {g[i].lam, cfg.p}, cfg.method, &methods[i]);
    });
    Report r = start(cfg, {});
    for (std::size_t i = 0; i < g.size(); ++i)
        r.rows.push_back(moment_prefix(cfg, g[i].N, g[i].lam, vals[i], kNaN, methods[i]));
    return r;
}

Report cmd_mc(const ExperimentConfig& cfg) {
    cfg.validate();
    Report r = start(cfg, {"jackknife_stderr", "max_share", "heavy_tail", "n_samples"});
    for (const auto& [N, lam] : grid(cfg)) {
        const bool cond = cfg.method == "conditional";
        const MCEstimate m = cond ? mc_moment_conditional(cfg.spec(N), {lam, cfg.p}, cfg.samples, cfg.seed, cfg.threads)
                                  : mc_moment(cfg.spec(N), {lam, cfg.p}, cfg.samples, cfg.seed, cfg.threads);
        auto row = moment_prefix(cfg, N, lam, m.log_mean, m.log_mean_stderr, cond ? "mc-conditional" : "mc");
        row.push_back(num(m.jackknife_stderr));
        row.push_back(m.max_share);
        row.push_back(m.heavy_tail);
        row.push_back(m.n_samples);
        r.rows.push_back(std::move(row));
    }
    return r;
}

Report cmd_error_scan(const ExperimentConfig& cfg) {
    cfg.validate();
    const Tolerances tol = cfg.tolerances();
    Report r = start(cfg, {"log_predicted", "rel_error", "used_in_fit"});
    Json fits = Json::array();
    for (double lam : sorted(cfg.lambda)) {
        const ScanResult s = error_scan(cfg.spec(cfg.N.front()), {lam, cfg.p}, cfg.N, tol.drop_rel_error, cfg.threads);
        for (const auto& row : s.rows) {
            const std::string m = (cfg.beta == 2.0 && cfg.p <= 6) ? "determinant" : "dual";
            auto out = moment_prefix(cfg, row.N, lam, row.log_exact, kNaN, m);
            out.push_back(row.log_predicted);
            out.push_back(row.rel_error);
            out.push_back(row.used_in_fit);
            r.rows.push_back(std::move(out));
        }
        Json f;
        f["lambda"] = lam;
        f["fitted_slope"] = num(s.fitted_slope);
        f["slope_stderr"] = num(s.slope_stderr);
        f["expected_slope"] = -error_exponent(cfg.beta);
        f["dropped_N"] = s.dropped;
        fits.push_back(std::move(f));
    }
    r.summary["fits"] = std::move(fits);
    return r;
}

Report cmd_identity(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<std::array<int, 3>> triples = cfg.triples;
    if (triples.empty())
        for (auto [m, n] : std::vector<std::pair<int, int>>{{1, 1}, {2, 1}, {1, 2}, {3, 2}, {2, 3}, {3, 1}, {1, 3}})
            for (int p = 1; p <= 4; ++p) triples.push_back({m, n, p});
    std::sort(triples.begin(), triples.end());
    Report r;
    r.config = cfg.to_json();
    r.columns = kMomentColumns;
    for (const char* c : {"m", "n", "log_a_tilde", "abs_log_diff", "product_residual"}) r.columns.push_back(c);
    double worst = 0;
    for (const auto& [m, n, p] : triples) {
        const RationalBeta rb(m, n);
        const SignedLog a = a_beta_p(rb.beta(), p), t = a_tilde(rb, p);
        const double diff = (a.sign == t.sign) ? std::fabs(a.log_abs - t.log_abs) : INFINITY;
        double prod = 0;
        for (double s : {0.2, 0.9, 1.7, 3.1}) prod = std::max(prod, gamma_product_identity_residual(s, m, n, p));
        worst = std::max({worst, diff, prod});
        r.rows.push_back({"identity", rb.beta(), nullptr, p, nullptr, a.log_abs, nullptr, "identity", cfg.seed, m, n,
                          t.log_abs, num(diff), prod});
    }
    r.summary["max_residual"] = num(worst);
    return r;
}

Report cmd_density_reconstruct(const ExperimentConfig& cfg) {
    cfg.validate();
    if (!is_even_integer(cfg.beta)) throw ConfigError("density needs an even integer beta (p = beta/2)");
    const auto g = grid(cfg);
    std::vector<DensityPoint> pts(g.size());
    parallel_indices(g.size(), cfg.threads,
                     [&](std::size_t i) { pts[i] = density_reconstruct(cfg.spec(g[i].N), g[i].lam); });
    Report r = start(cfg, {"ratio", "log_limit_density"});
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto row = moment_prefix(cfg, g[i].N, g[i].lam, pts[i].log_rho_hat, kNaN, "density");
        row.push_back(pts[i].ratio);
        row.push_back(std::log(limiting_density(cfg.spec(g[i].N), g[i].lam)));
        r.rows.push_back(std::move(row));
    }
    return r;
}

Report cmd_verify(const ExperimentConfig& cfg) {
    cfg.validate();
    const Tolerances tol = cfg.tolerances();
    std::vector<CheckResult> checks;
    if (cfg.suite != "acceptance") checks = run_invariants(tol, cfg.seed, cfg.threads, cfg.checks);
    if (cfg.suite != "invariants") {
        auto acc = run_acceptance(tol, cfg.seed, cfg.threads, cfg.checks);
        checks.insert(checks.end(), acc.begin(), acc.end());
    }
    if (checks.empty()) throw ConfigError("no verify check matches the requested ids");
    Report r;
    r.config = cfg.to_json();
    r.columns = {"check", "description", "residual", "tolerance", "passed", "seconds", "budget_s", "detail"};
    int failed = 0;
    for (const auto& c : checks) {
        failed += !c.passed;
        r.rows.push_back({c.id, c.description, num(c.residual), c.tolerance, c.passed, c.seconds,
                          c.budget_s > 0 ? Json(c.budget_s) : Json(nullptr), c.detail});
    }
    r.summary["tolerances"] = tol.to_json();
    r.summary["n_checks"] = checks.size();
    r.summary["n_failed"] = failed;
    r.summary["all_passed"] = failed == 0;
    return r;
}

Report run_command(const ExperimentConfig& cfg) {
    const std::string& c = cfg.command;
    if (c == "predict") return cmd_predict(cfg);
    if (c == "oracle") return cmd_oracle(cfg);
    if (c == "mc") return cmd_mc(cfg);
    if (c == "error-scan") return cmd_error_scan(cfg);
    if (c == "identity") return cmd_identity(cfg);
    if (c == "density") return cmd_density_reconstruct(cfg);
    if (c == "verify") return cmd_verify(cfg);
    throw ConfigError("unknown command '" + c + "'");
}

} // namespace cpm::harness
