// Command-line front end for the moment library.
#include "cpm/errors.hpp"
#include "cpm/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace h = cpm::harness;

namespace {

// Exit codes: 0 success, 2 config error, 3 numerical-convergence failure, 4 verification failure.
int fail(int code, const std::string& kind, const std::string& msg) {
    h::Json e;
    e["error"] = kind;
    e["message"] = msg;
    e["exit_code"] = code;
    std::cerr << e.dump() << "\n";
    return code;
}

void apply_command_defaults(h::ExperimentConfig& c, bool n_given, bool lambda_given) {
    if (!n_given) {
        if (c.command == "error-scan")
            c.N = c.beta == 4.0 ? std::vector<int>{8, 16, 32, 64, 128} : std::vector<int>{8, 16, 32, 64, 128, 256};
        else if (c.command == "density")
            c.N = {16, 32, 64, 128};
        else if (c.command == "mc" || c.command == "oracle")
            c.N = {20};
    }
    if (!lambda_given && c.command == "density") c.lambda = {0.2};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Even moments of characteristic polynomials of classical beta-ensembles"};
    app.require_subcommand(1);
    h::ExperimentConfig cfg;
    std::string config_path;

    app.add_option("--seed", cfg.seed, "Random seed (u64)");
    app.add_option("--out", cfg.out, "Output path (default stdout)");
    app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--threads", cfg.threads, "Worker threads (0 = all cores)");
    app.add_option("--tolerance-profile", cfg.tolerance_profile, "Tolerance profile: default or quick");
    app.add_option("--tol", cfg.tolerance_overrides, "Tolerance override key=value (repeatable)")
        ->expected(1)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    app.add_option("--config", config_path, "JSON ExperimentConfig; its keys override flags");

    struct Sub {
        const char* name;
        const char* help;
    };
    const Sub subs[] = {{"predict", "Large-N predicted log-moments"},
                        {"oracle", "Exact log-moments (determinant, dual quadrature or brute force)"},
                        {"mc", "Monte Carlo log-moments from matrix models"},
                        {"error-scan", "Relative error of the prediction over an N-ladder and its fitted slope"},
                        {"identity", "Universality-constant identity table"},
                        {"density", "Finite-N density reconstruction against the limiting density"},
                        {"verify", "Run all invariant and acceptance checks"}};
    std::vector<CLI::App*> apps;
    std::vector<CLI::Option*> n_opts, l_opts;
    std::vector<std::string> triple_strings;
    for (const auto& s : subs) {
        CLI::App* a = app.add_subcommand(s.name, s.help);
        a->fallthrough();
        apps.push_back(a);
        const std::string name = s.name;
        if (name == "verify") {
            a->add_option("--suite", cfg.suite, "default, acceptance or invariants");
            a->add_option("--check", cfg.checks, "Only these check ids, comma separated")->delimiter(',');
            continue;
        }
        if (name == "identity") {
            a->add_option("--triple", triple_strings, "m,n,p triple (repeatable); default: the acceptance grid")
                ->expected(1)
                ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
            continue;
        }
        a->add_option("--family", cfg.family,
                      "gaussian, laguerre-fixed, laguerre-scaled, jacobi-fixed or jacobi-scaled");
        a->add_option("--beta", cfg.beta, "Dyson index");
        a->add_option("--param1", cfg.param1, "a (laguerre-fixed), alpha (laguerre-scaled), a1 or alpha1 (Jacobi)");
        a->add_option("--param2", cfg.param2, "a2 or alpha2 (Jacobi)");
        n_opts.push_back(a->add_option("--N", cfg.N, "Matrix sizes, comma separated")->delimiter(','));
        a->add_option("-p,--p", cfg.p, "Moment index p (power 2p)");
        l_opts.push_back(a->add_option("--lambda", cfg.lambda, "Evaluation points, comma separated")->delimiter(','));
        if (name == "mc") {
            a->add_option("--samples", cfg.samples, "Number of samples");
            a->add_option("--method", cfg.method, "auto (plain), plain or conditional (gaussian only)");
        }
        if (name == "oracle") a->add_option("--method", cfg.method, "auto, determinant, dual or brute");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        for (CLI::App* a : apps)
            if (a->parsed()) cfg.command = a->get_name();
        for (const auto& t : triple_strings) {
            std::array<int, 3> v{};
            char c1 = 0, c2 = 0;
            std::istringstream is(t);
            if (!(is >> v[0] >> c1 >> v[1] >> c2 >> v[2]) || c1 != ',' || c2 != ',')
                throw h::ConfigError("triple must be m,n,p: " + t);
            cfg.triples.push_back(v);
        }
        bool n_given = false, l_given = false;
        for (auto* o : n_opts) n_given = n_given || o->count() > 0;
        for (auto* o : l_opts) l_given = l_given || o->count() > 0;
        if (!config_path.empty()) {
            std::ifstream f(config_path);
            if (!f) throw h::ConfigError("cannot read config file " + config_path);
            h::Json j;
            try {
                j = h::Json::parse(f);
            } catch (const std::exception& e) {
                throw h::ConfigError(std::string("config is not valid JSON: ") + e.what());
            }
            if (j.contains("command") && j["command"] != cfg.command)
                throw h::ConfigError("config command does not match the subcommand");
            cfg.merge_json(j);
            n_given = n_given || j.contains("N");
            l_given = l_given || j.contains("lambda");
        }
        apply_command_defaults(cfg, n_given, l_given);
        cfg.validate();

        const h::Report r = h::run_command(cfg);
        const std::string text = h::emit(r, cfg.format);
        if (cfg.out.empty()) {
            std::cout << text;
        } else {
            std::ofstream o(cfg.out, std::ios::binary);
            if (!o) throw h::ConfigError("cannot write " + cfg.out);
            o << text;
        }
        if (cfg.command == "verify" && !r.summary.at("all_passed").get<bool>()) {
            for (std::size_t i = 0; i < r.rows.size(); ++i)
                if (!r.cell(i, "passed").get<bool>())
                    std::cerr << "FAILED " << r.cell(i, "check").get<std::string>() << ": residual "
                              << r.cell(i, "residual").dump() << " tolerance " << r.cell(i, "tolerance").dump()
                              << " " << r.cell(i, "detail").get<std::string>() << "\n";
            return 4;
        }
        return 0;
    } catch (const h::ConfigError& e) {
        return fail(2, "config", e.what());
    } catch (const cpm::UnsupportedError& e) {
        return fail(2, "unsupported", e.what());
    } catch (const cpm::SupportError& e) {
        return fail(2, "support", e.what());
    } catch (const cpm::DomainError& e) {
        return fail(2, "domain", e.what());
    } catch (const cpm::ConvergenceError& e) {
        return fail(3, "convergence", e.what());
    } catch (const std::exception& e) {
        return fail(3, "internal", e.what());
    }
}
