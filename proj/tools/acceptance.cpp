// Runs the ten acceptance criteria and prints one pass/fail line each; exit 0 iff all pass.
#include "cpm/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace h = cpm::harness;

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::uint64_t seed = 20240607;
    int threads = 1;
    std::string profile = "default";
    std::vector<int> only;
    app.add_option("--seed", seed, "Base seed for Monte Carlo criteria");
    app.add_option("--threads", threads, "Worker threads (0 = all cores)");
    app.add_option("--tolerance-profile", profile, "Tolerance profile");
    app.add_option("--criterion", only, "Run only these criteria (1..10)")->delimiter(',');
    CLI11_PARSE(app, argc, argv);

    h::Tolerances tol;
    try {
        tol = h::tolerance_profile(profile);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    if (only.empty())
        for (int k = 1; k <= 10; ++k) only.push_back(k);

    int failed = 0;
    double total = 0;
    for (int k : only) {
        const h::CheckResult c = h::run_criterion(k, tol, seed, threads);
        failed += !c.passed;
        total += c.seconds;
        std::printf("%s %-4s residual=%-11.4g tol=%-9.3g time=%7.2fs%s  %s | %s\n", c.passed ? "PASS" : "FAIL",
                    c.id.c_str(), c.residual, c.tolerance, c.seconds,
                    c.budget_s > 0 ? (" (budget " + std::to_string(static_cast<int>(c.budget_s)) + "s)").c_str() : "",
                    c.description.c_str(), c.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed, %.1fs total\n", static_cast<int>(only.size()) - failed, only.size(), total);
    return failed == 0 ? 0 : 1;
}
