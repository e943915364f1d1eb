#include "doctest.h"

#include "cpm/asymptotics.hpp"
#include "cpm/errors.hpp"
#include "cpm/harness.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace cpm;
using namespace cpm::harness;

namespace {

ExperimentConfig make(const std::string& cmd) {
    ExperimentConfig c;
    c.command = cmd;
    return c;
}

double num_at(const Report& r, std::size_t i, const char* col) { return r.cell(i, col).get<double>(); }

#ifndef CPMOMENTS_BIN
#define CPMOMENTS_BIN "cpmoments"
#endif

int run_cli(const std::string& args, std::string* out = nullptr) {
    const std::string path = "harness_cli_out.txt";
    const int rc = std::system((std::string(CPMOMENTS_BIN) + " " + args + " > " + path + " 2>/dev/null").c_str());
    if (out) {
        std::ifstream f(path);
        std::stringstream ss;
        ss << f.rdbuf();
        *out = ss.str();
    }
    std::remove(path.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

} // namespace

TEST_CASE("cmd_predict: Gaussian beta=2 N=100 lambda=0") {
    ExperimentConfig c = make("predict");
    c.N = {100};
    c.lambda = {0.0};
    const Report r = cmd_predict(c);
    REQUIRE(r.rows.size() == 1);
    CHECK(num_at(r, 0, "value_log") == doctest::Approx(std::log(200.0) - 100 * (1 + std::log(4.0))).epsilon(1e-13));
    CHECK(r.cell(0, "family") == "gaussian");
    CHECK(r.cell(0, "method") == "predict");
    CHECK(r.cell(0, "stderr_log").is_null());
    CHECK(num_at(r, 0, "error_exponent") == 1.0);
    for (std::size_t i = 0; i < kMomentColumns.size(); ++i) CHECK(r.columns[i] == kMomentColumns[i]);
}

TEST_CASE("cmd_predict: JacobiScaled(0,0) and JacobiFixed(0,0) columns coincide") {
    ExperimentConfig a = make("predict"), b = make("predict");
    a.family = "jacobi-scaled";
    b.family = "jacobi-fixed";
    for (auto* c : {&a, &b}) {
        c->N = {10, 200};
        c->lambda = {0.1, 0.5, 0.9};
        c->p = 2;
        c->beta = 4.0;
    }
    const Report ra = cmd_predict(a), rb = cmd_predict(b);
    REQUIRE(ra.rows.size() == 6);
    for (std::size_t i = 0; i < 6; ++i)
        CHECK(std::fabs(num_at(ra, i, "value_log") - num_at(rb, i, "value_log")) < 1e-10);
}

TEST_CASE("rows are ordered by sorted keys") {
    ExperimentConfig c = make("predict");
    c.N = {50, 10};
    c.lambda = {0.5, -0.2};
    const Report r = cmd_predict(c);
    REQUIRE(r.rows.size() == 4);
    CHECK(r.cell(0, "N") == 10);
    CHECK(num_at(r, 0, "lambda") == -0.2);
    CHECK(num_at(r, 1, "lambda") == 0.5);
    CHECK(r.cell(3, "N") == 50);
}

TEST_CASE("invalid inputs are structured errors") {
    ExperimentConfig c = make("predict");
    c.lambda = {1.5};
    CHECK_THROWS_AS(cmd_predict(c), SupportError);
    c.lambda = {0.1};
    c.family = "circular";
    CHECK_THROWS_AS(cmd_predict(c), ConfigError);
    c.family = "gaussian";
    c.format = "xml";
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.format = "csv";
    c.tolerance_profile = "nope";
    CHECK_THROWS_AS(c.validate(), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json(Json::parse(R"({"bogus": 1})")), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json(Json::parse(R"({"beta": "two"})")), ConfigError);
}

TEST_CASE("config round-trips through JSON") {
    ExperimentConfig c = make("mc");
    c.family = "laguerre-scaled";
    c.param1 = 1.25;
    c.N = {3, 9};
    c.lambda = {0.4, 2.0};
    c.seed = 18446744073709551557ull;
    c.tolerance_overrides = {"z_max=4"};
    c.triples = {{1, 2, 3}};
    const Json j = c.to_json();
    CHECK(ExperimentConfig::from_json(j).to_json() == j);
    CHECK(ExperimentConfig::from_json(Json::parse(j.dump())).to_json().dump() == j.dump());
}

TEST_CASE("tolerance table is versioned and overridable") {
    Tolerances t = tolerance_profile("default");
    CHECK(t.to_json()["version"] == kTolerancesVersion);
    CHECK(t.identity_log == 1e-9);
    t.apply_override("z_max=3.5");
    CHECK(t.z_max == 3.5);
    t.apply_override("mc_samples=5000");
    CHECK(t.mc_samples == 5000);
    CHECK_THROWS_AS(t.apply_override("no_such=1"), ConfigError);
    CHECK_THROWS_AS(t.apply_override("z_max"), ConfigError);
    CHECK_THROWS_AS(t.apply_override("z_max=abc"), ConfigError);
    CHECK(tolerance_profile("quick").mc_samples == 20000);
}

TEST_CASE("CSV and JSON output round-trips byte-identically") {
    ExperimentConfig c = make("predict");
    c.family = "laguerre-fixed";
    c.param1 = 0.7;
    c.N = {7, 64};
    c.lambda = {0.1, 0.33, 0.9};
    Report r = cmd_predict(c);
    // exercise awkward cells
    r.columns.push_back("note");
    for (auto& row : r.rows) row.push_back("a,b \"quoted\"");
    r.rows[0].back() = nullptr;
    r.summary["x"] = 1e-300;
    const std::string csv = emit_csv(r), json = emit_json(r);
    CHECK(emit_csv(parse_csv(csv)) == csv);
    CHECK(emit_json(parse_json(json)) == json);
    const Report back = parse_csv(csv);
    CHECK(back.config == r.config);
    CHECK(back.cell(1, "note") == "a,b \"quoted\"");
    CHECK(back.cell(0, "note").is_null());
    for (std::size_t i = 0; i < r.rows.size(); ++i)
        CHECK(back.cell(i, "value_log").get<double>() == r.cell(i, "value_log").get<double>());
    const Report jb = parse_json(json);
    CHECK(jb.rows == r.rows);
}

TEST_CASE("cmd_oracle picks an exact path and matches two methods") {
    ExperimentConfig c = make("oracle");
    c.N = {2};
    c.lambda = {0.1};
    c.method = "auto";
    const Report det = cmd_oracle(c);
    CHECK(det.cell(0, "method") == "determinant");
    c.method = "brute";
    const Report bf = cmd_oracle(c);
    CHECK(std::fabs(num_at(det, 0, "value_log") - num_at(bf, 0, "value_log")) < 1e-7);
    c.beta = 4.0;
    c.p = 2;
    c.N = {10};
    c.method = "auto";
    CHECK_THROWS_AS(cmd_oracle(c), UnsupportedError);
}

TEST_CASE("cmd_mc rows reproduce bit-for-bit from their config") {
    ExperimentConfig c = make("mc");
    c.N = {6};
    c.lambda = {0.2};
    c.samples = 4000;
    c.seed = 77;
    const Report a = cmd_mc(c);
    c.threads = 3;
    const Report b = cmd_mc(ExperimentConfig::from_json(a.config));
    CHECK(a.rows == b.rows);
    CHECK(cmd_mc(c).rows == a.rows);
    CHECK(a.cell(0, "seed") == 77);
}

TEST_CASE("error_scan: fit and the pre-asymptotic drop rule") {
    const ScanResult s = error_scan(EnsembleSpec::gaussian(2.0, 8), {0.3, 1}, {8, 16, 32, 64, 128, 256}, 0.5);
    CHECK(s.fitted_slope >= -1.3);
    CHECK(s.fitted_slope <= -0.7);
    CHECK(s.dropped.empty());
    for (const auto& r : s.rows) CHECK(r.rel_error == doctest::Approx(std::fabs(std::expm1(r.log_exact - r.log_predicted))));
    // a threshold below the smallest-N error drops exactly that point
    const ScanResult d = error_scan(EnsembleSpec::gaussian(2.0, 8), {0.3, 1}, {8, 16, 32, 64}, 1e-3);
    REQUIRE(d.dropped.size() == 1);
    CHECK(d.dropped[0] == 8);
    CHECK_FALSE(d.rows[0].used_in_fit);
    CHECK_THROWS_AS(error_scan(EnsembleSpec::gaussian(4.0, 8), {0.3, 2}, {8, 16, 32}, 0.5), UnsupportedError);
}

TEST_CASE("error_scan slopes for beta = 1 and 4") {
    const ScanResult b1 = error_scan(EnsembleSpec::gaussian(1.0, 8), {0.3, 1}, {8, 16, 32, 64, 128, 256}, 0.5);
    CHECK(b1.fitted_slope >= -1.3);
    CHECK(b1.fitted_slope <= -0.7);
    const ScanResult b4 = error_scan(EnsembleSpec::gaussian(4.0, 8), {0.3, 1}, {8, 16, 32, 64, 128}, 0.5);
    CHECK(b4.fitted_slope >= -0.8);
    CHECK(b4.fitted_slope <= -0.2);
}

TEST_CASE("cmd_error_scan summary records the fit") {
    ExperimentConfig c = make("error-scan");
    c.N = {16, 32, 64};
    c.lambda = {0.3};
    c.p = 2;
    const Report r = cmd_error_scan(c);
    CHECK(r.rows.size() == 3);
    const Json& f = r.summary["fits"][0];
    CHECK(f["expected_slope"] == -1.0);
    CHECK(f["fitted_slope"].get<double>() < -0.7);
    CHECK(f["dropped_N"].empty());
}

TEST_CASE("cmd_identity examples") {
    ExperimentConfig c = make("identity");
    c.triples = {{1, 2, 1}, {1, 1, 2}, {3, 2, 4}};
    const Report r = cmd_identity(c);
    REQUIRE(r.rows.size() == 3);
    // sorted: (1,1,2), (1,2,1), (3,2,4)
    CHECK(num_at(r, 0, "value_log") == doctest::Approx(std::log(1.0 / 12)).epsilon(1e-13));
    CHECK(num_at(r, 0, "abs_log_diff") < 1e-12);
    CHECK(num_at(r, 1, "value_log") == doctest::Approx(std::log(1.0 / 6)).epsilon(1e-13));
    CHECK(num_at(r, 1, "log_a_tilde") == doctest::Approx(std::log(1.0 / 6)).epsilon(1e-13));
    CHECK(num_at(r, 2, "abs_log_diff") < 1e-9);
    CHECK(num_at(r, 2, "product_residual") < 1e-9);
    c.triples.clear();
    const Report all = cmd_identity(c);
    CHECK(all.rows.size() == 28);
    CHECK(all.summary["max_residual"].get<double>() < 1e-9);
}

TEST_CASE("density reconstruction") {
    ExperimentConfig c = make("density");
    c.N = {16, 32, 64, 128};
    for (double lam : {0.2, 0.0}) {
        c.lambda = {lam};
        const Report r = cmd_density_reconstruct(c);
        REQUIRE(r.rows.size() == 4);
        for (std::size_t i = 1; i < 4; ++i)
            CHECK(std::fabs(num_at(r, i, "ratio") - 1) < std::fabs(num_at(r, i - 1, "ratio") - 1));
        CHECK(std::fabs(num_at(r, 3, "ratio") - 1) < 0.1);
    }
    const DensityPoint j = density_reconstruct(EnsembleSpec::jacobi_fixed(2.0, 64, 0.0, 0.0), 0.5);
    CHECK(std::fabs(j.ratio - 1) < 0.15);
    // N = 1 closed form: the 2-point Gaussian density at lambda
    const DensityPoint one = density_reconstruct(EnsembleSpec::gaussian(2.0, 1), 0.3);
    {
        // rho_2(x) = 2 * int exp(-2x^2 - 2y^2)(x-y)^2 dy / Z_2, Z_2 = int int ... = pi/4
        const double x = 0.3;
        const double inner = std::sqrt(std::acos(-1.0) / 2) * (x * x + 0.25) * std::exp(-2 * x * x);
        CHECK(one.log_rho_hat == doctest::Approx(std::log(2 * inner / (std::acos(-1.0) / 4))).epsilon(1e-10));
    }
    c.beta = 3.0;
    CHECK_THROWS_AS(cmd_density_reconstruct(c), ConfigError);
    CHECK_THROWS_AS(density_reconstruct(EnsembleSpec::gaussian(4.0, 4), 0.1), UnsupportedError);
}

TEST_CASE("parallel_indices preserves index order and propagates errors") {
    std::vector<int> v(101, -1);
    parallel_indices(v.size(), 4, [&](std::size_t i) { v[i] = static_cast<int>(i * i % 17); });
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == static_cast<int>(i * i % 17));
    CHECK_THROWS_AS(parallel_indices(10, 3, [](std::size_t i) { if (i == 7) throw ConvergenceError("x"); }),
                    ConvergenceError);
}

TEST_CASE("fast acceptance criteria pass") {
    const Tolerances t = tolerance_profile("default");
    for (int k : {1, 2, 6, 10}) {
        const CheckResult c = run_criterion(k, t, 1, 1);
        CAPTURE(c.id);
        CAPTURE(c.detail);
        CHECK(c.passed);
    }
}

TEST_CASE("CLI: exit codes, formats and config override") {
    std::string out;
    CHECK(run_cli("predict --N 100 --lambda 0", &out) == 0);
    CHECK(out.find("# config: ") == 0);
    CHECK(out.find("family,beta,N,p,lambda,value_log,stderr_log,method,seed") != std::string::npos);
    CHECK(run_cli("predict --lambda 1.5") == 2);
    CHECK(run_cli("predict --family nope") == 2);
    CHECK(run_cli("predict --tolerance-profile nope") == 2);
    CHECK(run_cli("oracle --beta 4 -p 2 --N 10") == 2);
    CHECK(run_cli("predict --N 10,20 --lambda -0.5,0.25 --format json", &out) == 0);
    const Report r = parse_json(out);
    CHECK(r.rows.size() == 4);
    CHECK(emit_json(r) == out);

    {
        std::ofstream f("harness_cfg.json");
        f << R"({"N": [30], "lambda": [0.1], "p": 2})";
    }
    CHECK(run_cli("predict --N 5 --config harness_cfg.json --format json", &out) == 0);
    const Report rc = parse_json(out);
    CHECK(rc.rows.size() == 1);
    CHECK(rc.cell(0, "N") == 30);
    CHECK(rc.cell(0, "p") == 2);
    {
        std::ofstream f("harness_cfg.json");
        f << R"({"N": [30], "unknown": 1})";
    }
    CHECK(run_cli("predict --config harness_cfg.json") == 2);
    std::remove("harness_cfg.json");
    CHECK(run_cli("verify --check C1,C2 --tol identity_log=0") == 4);
    CHECK(run_cli("verify --check C1,C2,harness.round_trip") == 0);
    CHECK(run_cli("verify --check nothing") == 2);
}
