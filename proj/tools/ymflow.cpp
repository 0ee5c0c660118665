#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "ymflow/common.hpp"
#include "ymflow/config.hpp"
#include "ymflow/harness.hpp"
#include "ymflow/io.hpp"

// exit codes: 0 ok, 1 a check failed, 2 rejected input, 3 solver failure or partial run

int main(int argc, char** argv) {
    CLI::App app{"ymflow: Young-measure solutions of forward-backward and linear-growth flows"};
    app.require_subcommand(1);

    std::string config_path, out;
    long long seed = -1;
    int jobs = 0;
    bool override_adm = false;
    std::vector<int> only;

    app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--out", out, "output root (beats YMFLOW_OUT and the config)");
    app.add_option("--seed", seed, "RNG seed");
    app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

    auto* catalog = app.add_subcommand("catalog", "admissibility table of every catalog potential");
    auto* convexify = app.add_subcommand("convexify", "envelope, recession table and admissibility of one potential");
    auto* continuation = app.add_subcommand("continuation", "epsilon schedule, limit and Young-measure diagnostics");
    continuation->add_flag("--override-admissibility", override_adm, "run even if the potential fails the structure checks");
    auto* contraction = app.add_subcommand("contraction", "L2 distance of two solutions and the I1 check");
    auto* compare = app.add_subcommand("compare", "Young-measure limit against the strong solution");
    auto* verify = app.add_subcommand("verify", "acceptance suite");
    verify->add_option("--only", only, "criterion numbers to run, e.g. 5,6")->delimiter(',')->check(CLI::Range(1, 9));
    auto* report = app.add_subcommand("report", "render SVG plots for every artifact under the output root");
    for (auto* s : {catalog, convexify, continuation, contraction, compare, verify, report}) s->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        using namespace ymflow;
        RunConfig c = config_path.empty() ? RunConfig{} : load_config(config_path);
        if (seed >= 0) c.seed = static_cast<std::uint64_t>(seed);
        if (jobs > 0) c.jobs = jobs;
        c.validate();
        const auto root = output_root(out, c.output);

        if (*catalog) return cmd_catalog(c, root);
        if (*convexify) return cmd_convexify(c, root);
        if (*continuation) return cmd_continuation(c, root, override_adm);
        if (*contraction) return cmd_contraction(c, root);
        if (*compare) return cmd_compare(c, root);
        if (*verify) return cmd_verify(c, root, only);
        if (*report) return cmd_report(root);
    } catch (const ymflow::Rejected& e) {
        std::fprintf(stderr, "rejected: %s\n", e.what());
        return 2;
    } catch (const ymflow::SolverFailure& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
