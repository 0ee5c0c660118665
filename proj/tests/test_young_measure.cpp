#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ymflow/continuation.hpp"
#include "ymflow/young_measure.hpp"

using namespace ymflow;

namespace {

ScalarField step_field(const Grid& g, double height) {
    ScalarField u(g);
    for (int i = 0; i < g.nx(); ++i) {
        const double x = g.node(i)[0];
        u.v[i] = (x > 0.3 && x < 0.7) ? height : (x > 0.15 && x < 0.85 ? 0.5 * height : 0.0);
    }
    return u;
}

Integrand abs_integrand() {
    return {"abs", [](const Vec2& A) { return norm(A); }, [](const Vec2& v) { return norm(v); }};
}

}  // namespace

TEST_CASE("histogram keeps the mass-weighted mean atom") {
    Histogram h;
    hist_add(h, 3, 1.0, {1.0, 0.0});
    hist_add(h, 3, 3.0, {2.0, 0.0});
    hist_add(h, 1, 4.0, {-1.0, 0.0});
    REQUIRE(h.size() == 2);
    CHECK(hist_total(h) == doctest::Approx(8.0));
    hist_normalize(h);
    CHECK(h[0].bin == 1);
    CHECK(h[1].mass == doctest::Approx(0.5));
    CHECK(h[1].atom[0] == doctest::Approx(1.75));
}

TEST_CASE("bins") {
    BinSpec b;
    b.per_axis = 8;
    b.r_hist = 4.0;
    for (double a = -3.9; a < 4.0; a += 0.3) {
        const int k = b.bin_of({a, 0.0});
        CHECK(std::abs(b.center(k)[0] - a) <= 0.5 * b.width() + 1e-12);
    }
    BinSpec s2;
    s2.dim = 2;
    for (int k = 0; k < s2.sphere_count(); ++k) CHECK(s2.sphere_bin_of(s2.sphere_center(k)) == k);
}

TEST_CASE("elementary measure reproduces the total variation") {
    const Grid g = Grid::line(199);
    const ScalarField u = step_field(g, 2.0);
    const BVSplit split = bv_split(u, default_jump_threshold(u));
    REQUIRE(split.count() == 4);
    BinSpec bins;
    const GeneralizedYoungMeasure m = elementary(u, split, bins);
    CHECK_NOTHROW(m.validate());
    CHECK(pair(m, abs_integrand()) == doctest::Approx(total_variation(u)).epsilon(1e-12));
    CHECK(m.lambda_interior() == doctest::Approx(4.0));
    CHECK(m.lambda_boundary() == 0.0);
    // face by face: Dirac at ∇u off the jump, concentration of mass |∇u| h on it
    const VectorField gu = gradient(u);
    const Integrand area{"area", [](const Vec2& A) { return std::sqrt(1.0 + dot(A, A)); },
                         [](const Vec2& v) { return norm(v); }};
    double oracle = 0.0;
    for (std::size_t f = 0; f < g.nfaces(); ++f) {
        const double a = std::abs(gu.x[f]);
        oracle += split.singular[f] ? (1.0 + a) * g.h(0) : std::sqrt(1.0 + a * a) * g.h(0);
    }
    CHECK(pair(m, area) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK_THROWS_AS(pair(m, Integrand{"sq", [](const Vec2& A) { return dot(A, A); }, {}}), Rejected);
}

TEST_CASE("boundary concentration carries the trace") {
    const Grid g = Grid::line(99);
    ScalarField u(g);
    for (int i = 0; i < g.nx(); ++i) u.v[i] = 1.0;
    const GeneralizedYoungMeasure m = elementary(u, bv_split(u, default_jump_threshold(u)), BinSpec{});
    REQUIRE(m.trace.size() == 2);
    CHECK(m.trace[0] == doctest::Approx(1.0));
    CHECK(m.lambda_boundary() > 0.0);
}

TEST_CASE("validate rejects a negative mass") {
    const Grid g = Grid::line(15);
    ScalarField u(g);
    GeneralizedYoungMeasure m = elementary(u, bv_split(u, 1.0), BinSpec{});
    m.nu[3][0].mass = -0.5;
    CHECK_THROWS_AS(m.validate(), Rejected);
}

TEST_CASE("laminate measure of the relaxed flux") {
    const PotentialSpec p = make_potential("gauss-dip");
    const FluxModel F = make_flux(p, FluxMode::Relaxed, 1e-3, 16.0);
    const Grid g = Grid::line(63);
    ScalarField u(g);
    for (int i = 0; i < g.nx(); ++i) u.v[i] = 1.595 * std::min(g.node(i)[0], 1.0 - g.node(i)[0]);
    BinSpec bins;
    bins.r_hist = 8.0;
    const GeneralizedYoungMeasure m = epsilon_level(u, F, bins);
    double bar = 0.0, l1 = 0.0;
    check_barycenter(m, u, bar, l1);
    CHECK(bar < 1e-12);
    const RadialHull hull = radial_hull(p, 0.0, 16.0);
    const CoincidenceOracle o = CoincidenceOracle::radial(hull);
    // atoms sit at the contact points of the ε-shifted hull, near the coincidence set
    CHECK(check_support(m, o) <= 1.0);
    std::size_t two = 0;
    for (const auto& h : m.nu) two += h.size() == 2;
    CHECK(two > 0);
}

TEST_CASE("compactified transform accepts linear growth only") {
    CHECK(compactified_transform(abs_integrand(), 1).accepted);
    CHECK(compactified_transform(abs_integrand(), 2).accepted);
    const Integrand quad{"quad", [](const Vec2& A) { return dot(A, A); }, [](const Vec2& v) { return norm(v); }};
    CHECK_FALSE(compactified_transform(quad, 1).accepted);
}

TEST_CASE("Jensen dictionary holds on Dirac measures of the envelope") {
    const PotentialSpec p = make_potential("minimal-surface");
    const ConvexEnvelope env = build_envelope(p, 16.0, 2001);
    const RecessionTable rec = recession(p, &env, 16);
    const RadialHull hull = radial_hull(p, 0.0, 16.0);
    const auto dict = jensen_dictionary(p, &hull, rec);
    CHECK(dict.size() >= 3);
    const Grid g = Grid::line(63);
    ScalarField u(g);
    for (int i = 0; i < g.nx(); ++i) u.v[i] = std::sin(M_PI * g.node(i)[0]);
    const GeneralizedYoungMeasure m = elementary(u, bv_split(u, 1e9), BinSpec{});
    CHECK(check_jensen(m, dict) >= -1e-12);
}

TEST_CASE("uniqueness integrand is nonnegative for a convex potential") {
    const PotentialSpec p = make_potential("log-cosh");
    const RadialHull hull = radial_hull(p, 0.0, 16.0);
    const CoincidenceOracle o = CoincidenceOracle::radial(hull);
    const Grid g = Grid::line(63);
    ScalarField a(g), b(g);
    for (int i = 0; i < g.nx(); ++i) {
        a.v[i] = std::sin(M_PI * g.node(i)[0]);
        b.v[i] = 0.3 * std::sin(2 * M_PI * g.node(i)[0]);
    }
    const GeneralizedYoungMeasure ma = elementary(a, bv_split(a, 1e9), BinSpec{});
    const GeneralizedYoungMeasure mb = elementary(b, bv_split(b, 1e9), BinSpec{});
    const UniquenessProbe pr = uniqueness_integrand(ma, mb, p, o);
    CHECK(pr.checked > 0);
    CHECK(pr.min_value >= -1e-14);
    // (q(A)-q(B))(A-B) for Dirac measures
    const VectorField ga = gradient(a), gb = gradient(b);
    for (const auto& [f, v] : pr.values) {
        const double A = ga.x[f], B = gb.x[f];
        CHECK(v == doctest::Approx((std::tanh(A) - std::tanh(B)) * (A - B)).epsilon(1e-10));
    }
}
