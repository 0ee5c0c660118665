#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ymflow/config.hpp"
#include "ymflow/harness.hpp"
#include "ymflow/io.hpp"

using namespace ymflow;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("ymflow_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("config round trip and hash") {
    RunConfig c;
    c.potential = "gauss-dip";
    c.eps = {0.2, 0.1, 0.05, 0.025};
    c.initial = {"bump", 0.5, 1, 0.4, 0.1};
    c.tol.tol_jf = 3e-3;
    const RunConfig d = config_from_json(to_json(c));
    CHECK(d == c);
    CHECK(config_hash(c) == config_hash(d));
    d.validate();
    RunConfig e = c;
    e.seed = 2;
    CHECK(config_hash(e) != config_hash(c));
    CHECK(config_hash(c).size() == 16);
    e = c;
    e.jobs = 8;
    e.output = "elsewhere";
    CHECK(config_hash(e) == config_hash(c));
}

TEST_CASE("config rejects unknown keys and bad values") {
    nlohmann::json j = to_json(RunConfig{});
    j["grid"]["cels"] = 3;
    CHECK_THROWS_AS(config_from_json(j), Rejected);
    j = to_json(RunConfig{});
    j["schedule"]["eps"] = {0.1, 0.2, 0.05};
    CHECK_THROWS_AS(config_from_json(j), Rejected);
    j = to_json(RunConfig{});
    j["schedule"]["flux"] = "magic";
    CHECK_THROWS_AS(config_from_json(j), Rejected);
    j = to_json(RunConfig{});
    j["time"]["dt"] = 0.3;
    CHECK_THROWS_AS(config_from_json(j), Rejected);
    CHECK_THROWS(load_config("/nonexistent/config.json"));
}

TEST_CASE("partial config keeps defaults") {
    const RunConfig c = config_from_json(nlohmann::json::parse(R"({"potential": {"id": "log-cosh"}, "seed": 9})"));
    CHECK(c.potential == "log-cosh");
    CHECK(c.seed == 9);
    CHECK(c.cells == RunConfig{}.cells);
}

TEST_CASE("output root precedence") {
    ::unsetenv("YMFLOW_OUT");
    CHECK(output_root("", "from_config") == fs::path("from_config"));
    ::setenv("YMFLOW_OUT", "from_env", 1);
    CHECK(output_root("", "from_config") == fs::path("from_env"));
    CHECK(output_root("from_flag", "from_config") == fs::path("from_flag"));
    ::unsetenv("YMFLOW_OUT");
}

TEST_CASE("csv cells round trip exactly") {
    const fs::path dir = scratch("csv");
    const double vals[] = {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-308, 0.0};
    {
        CsvWriter w(dir / "a.csv", "abc", {"k", "v"});
        long long k = 0;
        for (double v : vals) {
            w.cell(k++).cell(v);
            w.end_row();
        }
    }
    const std::string text = slurp(dir / "a.csv");
    CHECK(text.rfind("# config_hash=abc\nk,v\n", 0) == 0);
    const CsvTable t = read_csv(dir / "a.csv");
    REQUIRE(t.rows.size() == 5);
    for (std::size_t r = 0; r < 5; ++r) CHECK(t.rows[r][t.column("v")] == vals[r]);
    CHECK(fmt17(0.1) == "0.10000000000000001");
}

TEST_CASE("initial data") {
    const Grid g = Grid::line(9);
    const ScalarField t = make_initial(g, {"tent", 2.0, 1, 0.5, 0.2});
    for (int i = 0; i < g.nx(); ++i) {
        const double x = g.node(i)[0];
        CHECK(t.v[i] == doctest::Approx(2.0 * std::min(x, 1.0 - x)));
    }
    const ScalarField s = make_initial(g, {"step", 1.0, 1, 0.5, 0.2});
    CHECK(s.v[4] == 1.0);
    CHECK(s.v[0] == 0.0);
    const Grid g2 = Grid::square(9);
    const ScalarField t2 = make_initial(g2, {"tent", 1.0, 1, 0.5, 0.2});
    const Vec2 x = g2.node(1, 4);
    CHECK(t2.at(1, 4) == doctest::Approx(std::min({x[0], 1.0 - x[0], x[1], 1.0 - x[1]})));
    CHECK_THROWS_AS(make_initial(g, {"wave", 1.0, 1, 0.5, 0.2}), Rejected);
}

TEST_CASE("catalog and convexify write manifests") {
    const fs::path root = scratch("catalog");
    RunConfig c;
    CHECK(cmd_catalog(c, root) == 0);
    CHECK(fs::exists(root / "catalog" / "manifest.json"));
    const auto m = nlohmann::json::parse(slurp(root / "catalog" / "manifest.json"));
    CHECK(m["config_hash"] == config_hash(c));
    CHECK(cmd_convexify(c, root) == 0);
    CHECK(fs::exists(root / "convexify" / "manifest.json"));
}

TEST_CASE("continuation refuses an inadmissible potential unless overridden") {
    const fs::path root = scratch("gate");
    RunConfig c;
    c.potential = "double-well-test";
    c.cells = {31};
    c.T = 0.0;
    c.envelope_r_max = 4.0;
    c.envelope_samples = 401;
    CHECK_THROWS_AS(cmd_continuation(c, root, false), Rejected);
}

TEST_CASE("continuation, contraction, compare and report on a small run") {
    const fs::path root = scratch("pipeline");
    RunConfig c;
    c.cells = {31};
    c.T = 0.01;
    c.dt = 5e-4;
    c.stride = 5;
    c.eps = {0.1, 0.05, 0.025};
    CHECK(cmd_continuation(c, root, false) == 0);
    for (const char* f : {"norms.csv", "schedule.csv", "u_limit.csv", "structural.csv", "weak_form.csv", "manifest.json"})
        CHECK(fs::exists(root / "continuation" / f));
    CHECK(cmd_contraction(c, root) == 0);
    CHECK(fs::exists(root / "contraction" / "contraction.csv"));
    CHECK(cmd_compare(c, root) == 0);
    CHECK(fs::exists(root / "compare" / "equivalence.csv"));
    CHECK(cmd_report(root) == 0);
    CHECK(fs::exists(root / "continuation" / "u_limit.svg"));
    RunConfig nc = c;
    nc.potential = "gauss-dip";
    CHECK_THROWS_AS(cmd_compare(nc, root), Rejected);
}

TEST_CASE("svg output is well formed") {
    const std::string s = svg_lines("t", "x", {Series{"a", {0, 1, 2}, {1, 2, 3}}});
    CHECK(s.rfind("<svg", 0) == 0);
    CHECK(s.find("</svg>") != std::string::npos);
    const std::string h = svg_heatmap("h", 2, 2, {0, 1, 2, 3});
    CHECK(h.find("<rect") != std::string::npos);
}
