// Runs every acceptance criterion and prints one line per criterion.
// --negative-control tightens tol_jf far below the estimator resolution: the
// structural suite must then fail while the contraction suite still passes.

#include <cstdio>
#include <cstdlib>
#include <thread>

#include <CLI11.hpp>

#include "ymflow/acceptance.hpp"
#include "ymflow/config.hpp"
#include "ymflow/io.hpp"

using namespace ymflow;

int main(int argc, char** argv) {
    CLI::App app{"acceptance suite"};
    std::string out;
    int jobs = static_cast<int>(std::min(4u, std::max(1u, std::thread::hardware_concurrency())));
    bool negative = false;
    std::vector<int> only;
    app.add_option("--out", out, "output root");
    app.add_option("--jobs", jobs);
    app.add_option("--only", only)->check(CLI::Range(1, 9));
    app.add_flag("--negative-control", negative);
    CLI11_PARSE(app, argc, argv);

    RunConfig c;
    c.jobs = jobs;
    const auto root = output_root(out, "acceptance_out");
    SuiteSettings s = suite_settings(c);

    if (negative) {
        s.tol.tol_jf = 1e-6;
        const auto dir = root / "negative_control";
        const CriterionResult a6 = run_criterion(6, s, dir), a7 = run_criterion(7, s, dir);
        std::printf("%s\n%s\n", summary_line(a6).c_str(), summary_line(a7).c_str());
        const bool ok = !a6.pass && a6.error.empty() && a7.pass;
        std::printf("NEGATIVE-CONTROL %s tampered tol_jf=1e-6: structural suite %s, contraction %s\n", ok ? "PASS" : "FAIL",
                    a6.pass ? "passed" : "failed", a7.pass ? "passed" : "failed");
        return ok ? 0 : 1;
    }

    const auto dir = root / "acceptance";
    const SuiteResult r = run_suite(s, dir, only);
    write_suite(r, s, dir);
    for (const auto& cr : r.criteria) std::printf("%s\n", summary_line(cr).c_str());
    std::printf("artifacts: %s\n", dir.string().c_str());
    return r.passed() ? 0 : 1;
}
