#pragma once

#include "cpm/ensemble.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace cpm::harness {

using Json = nlohmann::ordered_json;

// Malformed or inconsistent experiment configuration (exit code 2).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// One versioned table of every tolerance, sample count and runtime budget used by the checks.
struct Tolerances {
    std::string profile = "default";
    double identity_log = 1e-9;
    double identity_runtime_s = 1.0;
    double keating_snaith_rel = 1e-12;
    double duality_rel = 1e-5;
    double duality_runtime_s = 120.0;
    double slope_halfwidth = 0.3;
    double scan_runtime_s = 300.0;
    double drop_rel_error = 0.5;
    double beta2_terminal_rel = 0.05;
    double beta2_runtime_s = 120.0;
    double cg21_log = 1e-8;
    double cg21_runtime_s = 10.0;
    double z_max = 3.0;
    long hermite_samples = 100000;
    double hermite_runtime_s = 60.0;
    double density_ratio = 0.1;
    double density_jacobi_ratio = 0.15;
    double density_runtime_s = 120.0;
    long mc_samples = 200000;
    double mc_rel = 0.02;
    double mc_runtime_s = 120.0;
    double degeneration_ls = 1e-9;
    double degeneration_js = 1e-10;
    double two_path_rel = 1e-8;
    double saddle_residual = 1e-10;
    double density_norm = 1e-6;
    double speclog_rel = 1e-12;

    Json to_json() const;
    // Applies "key=value" overrides; unknown keys raise ConfigError.
    void apply_override(const std::string& assignment);
};

inline constexpr const char* kTolerancesVersion = "cpm-tolerances/1";

// Profiles: "default" (the acceptance values) and "quick" (10x fewer MC samples, for smoke runs).
Tolerances tolerance_profile(const std::string& name);
std::vector<std::string> tolerance_profile_names();

struct ExperimentConfig {
    std::string command = "predict";
    std::string family = "gaussian";
    double beta = 2.0;
    double param1 = 0.0;
    double param2 = 0.0;
    std::vector<int> N = {100};
    int p = 1;
    std::vector<double> lambda = {0.3};
    long samples = 100000;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string format = "csv";
    std::string out;  // empty: stdout
    std::string tolerance_profile = "default";
    std::vector<std::string> tolerance_overrides;
    std::string method = "auto";                        // oracle: auto, determinant, dual, brute; mc: auto, plain, conditional
    std::vector<std::array<int, 3>> triples;            // identity: (m, n, p)
    std::string suite = "default";                      // verify: default, acceptance or invariants
    std::vector<std::string> checks;                    // verify: restrict to these check ids

    Json to_json() const;
    static ExperimentConfig from_json(const Json& j);  // missing keys keep defaults
    void merge_json(const Json& j);                      // present keys override
    void validate() const;                               // throws ConfigError
    EnsembleSpec spec(int n) const;
    Tolerances tolerances() const;
};

// Tabular result. Cells are JSON scalars: numbers, strings, booleans or null.
struct Report {
    Json config;
    std::vector<std::string> columns;
    std::vector<std::vector<Json>> rows;
    Json summary = Json::object();

    const Json& cell(std::size_t row, const std::string& column) const;
};

std::string emit_csv(const Report& r);
std::string emit_json(const Report& r);
std::string emit(const Report& r, const std::string& format);
Report parse_csv(const std::string& text);
Report parse_json(const std::string& text);

// Moment-table column prefix shared by every command.
inline const std::vector<std::string> kMomentColumns = {"family", "beta",    "N",      "p",   "lambda",
                                                        "value_log", "stderr_log", "method", "seed"};

Report cmd_predict(const ExperimentConfig& cfg);
Report cmd_oracle(const ExperimentConfig& cfg);
Report cmd_mc(const ExperimentConfig& cfg);
Report cmd_error_scan(const ExperimentConfig& cfg);
Report cmd_identity(const ExperimentConfig& cfg);
Report cmd_density_reconstruct(const ExperimentConfig& cfg);
Report cmd_verify(const ExperimentConfig& cfg);  // summary.all_passed
Report run_command(const ExperimentConfig& cfg);

struct ScanRow {
    int N = 0;
    double log_exact = 0.0;
    double log_predicted = 0.0;
    double rel_error = 0.0;
    bool used_in_fit = true;
};

struct ScanResult {
    std::vector<ScanRow> rows;
    double fitted_slope = 0.0;
    double slope_stderr = 0.0;
    std::vector<int> dropped;
};

// Exact path: beta = 2 determinant (p <= 6) or the p = 1 dual; otherwise UnsupportedError.
double exact_log_moment(const EnsembleSpec& spec, const MomentQuery& q, const std::string& method, std::string* used);
ScanResult error_scan(const EnsembleSpec& base, const MomentQuery& q, std::vector<int> ladder, double drop_threshold,
                      int threads = 1);

struct DensityPoint {
    int N = 0;
    double lambda = 0.0;
    double log_rho_hat = 0.0;  // log of the (N+1)-point density at lambda
    double ratio = 0.0;        // rho_hat / (N rho(lambda))
};
DensityPoint density_reconstruct(const EnsembleSpec& spec, double lam);

struct CheckResult {
    std::string id;
    std::string description;
    double residual = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    double seconds = 0.0;
    double budget_s = 0.0;  // 0: no runtime budget
    std::string detail;
};

// The ten acceptance criteria, in order.
// `only` restricts to the listed check ids (C1..C10 or invariant ids); empty runs everything.
std::vector<CheckResult> run_acceptance(const Tolerances& tol, std::uint64_t seed, int threads,
                                        const std::vector<std::string>& only = {});
CheckResult run_criterion(int k, const Tolerances& tol, std::uint64_t seed, int threads);
// Module-level invariant checks (one block per module).
std::vector<CheckResult> run_invariants(const Tolerances& tol, std::uint64_t seed, int threads,
                                        const std::vector<std::string>& only = {});

// Order-preserving parallel map over [0, n).
void parallel_indices(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

} // namespace cpm::harness
