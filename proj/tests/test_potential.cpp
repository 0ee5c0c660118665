#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ymflow/potential.hpp"

using namespace ymflow;

namespace {

// sup over affine functions through two samples lying below every sample
std::vector<double> brute_hull(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> out(n, -1e300);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double s = (y[j] - y[i]) / (x[j] - x[i]);
            bool ok = true;
            for (std::size_t m = 0; m < n && ok; ++m) ok = y[i] + s * (x[m] - x[i]) <= y[m] + 1e-12;
            if (ok)
                for (std::size_t k = 0; k < n; ++k) out[k] = std::max(out[k], y[i] + s * (x[k] - x[i]));
        }
    return out;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int k = 0; k < n; ++k) v[k] = a + (b - a) * k / (n - 1);
    return v;
}

}  // namespace

TEST_CASE("double well hull is flat between the wells") {
    const auto x = linspace(-2.0, 2.0, 401);
    std::vector<double> y(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) y[k] = (x[k] * x[k] - 1.0) * (x[k] * x[k] - 1.0);
    const ConvexEnvelope e = convexify_1d(x, y);
    const auto oracle = brute_hull(x, y);
    for (std::size_t k = 0; k < x.size(); ++k) {
        CHECK(e.env[k] == doctest::Approx(oracle[k]).epsilon(1e-12));
        if (std::abs(x[k]) <= 1.0) CHECK(std::abs(e.env[k]) < 1e-12);
        else CHECK(e.env[k] == doctest::Approx(y[k]));
    }
    REQUIRE(e.contact_points.size() == 1);
    CHECK(e.contact_points[0].first == doctest::Approx(-1.0));
    CHECK(e.contact_points[0].second == doctest::Approx(1.0));
}

TEST_CASE("gauss-dip contact points match the brute-force hull") {
    const PotentialSpec p = make_potential("gauss-dip");
    const auto x = linspace(-8.0, 8.0, 801);
    std::vector<double> y(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) y[k] = p.eval({x[k], 0.0});
    const auto oracle = brute_hull(x, y);
    // oracle contact: last coincident sample before the first flat stretch on r > 0
    double a = -1, b = -1;
    for (std::size_t k = 400; k + 1 < x.size(); ++k) {
        const bool c = y[k] - oracle[k] < 1e-12, cn = y[k + 1] - oracle[k + 1] < 1e-12;
        if (c && !cn && a < 0) a = x[k];
        if (!c && cn && a >= 0 && b < 0) b = x[k + 1];
    }
    REQUIRE(a >= 0.0);
    REQUIRE(b > a);
    const RadialHull h = radial_hull(p, 0.0, 8.0);
    REQUIRE(h.intervals.size() == 1);
    const double dx = x[1] - x[0];
    CHECK(std::abs(h.intervals[0].first - a) <= dx);
    CHECK(std::abs(h.intervals[0].second - b) <= dx);
    CHECK(h.intervals[0].first > 0.0);
    // common tangent: equal slopes and the chord slope
    const double c1 = h.intervals[0].first, c2 = h.intervals[0].second;
    CHECK(p.dh(c1) == doctest::Approx(p.dh(c2)).epsilon(1e-8));
    CHECK((p.h(c2) - p.h(c1)) / (c2 - c1) == doctest::Approx(p.dh(c1)).epsilon(1e-8));
}

TEST_CASE("convexify_1d agrees with the oracle on random inputs") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        const int m = 3 + t % 40;
        const auto x = linspace(-1.0, 1.0, m);
        std::vector<double> y(m);
        for (double& v : y) v = U(rng);
        const auto e = convexify_1d(x, y);
        const auto o = brute_hull(x, y);
        for (int k = 0; k < m; ++k) CHECK(std::abs(e.env[k] - o[k]) <= 1e-12);
    }
}

TEST_CASE("convexify rejects bad input") {
    CHECK_THROWS_AS(convexify_1d({0.0, 1.0}, {0.0, 1.0}), Rejected);
    CHECK_THROWS_AS(convexify_1d({0.0, 1.0, 2.0}, {0.0, NAN, 1.0}), Rejected);
    CHECK_THROWS_AS(convexify_1d({0.0, 1.0, 3.0}, {0.0, 1.0, 1.0}), Rejected);
    CHECK_THROWS_AS(make_potential("no-such-potential"), Rejected);
}

TEST_CASE("2D transform reproduces convex samples") {
    for (const char* id : {"quadratic-test", "minimal-surface", "linear-test"}) {
        const PotentialSpec p = make_potential(id, 2);
        const ConvexEnvelope e = build_envelope(p, 3.0, 41);
        for (std::size_t k = 0; k < e.size(); ++k) CHECK(std::abs(e.env[k] - e.phi[k]) <= 1e-9 * (1.0 + std::abs(e.phi[k])));
    }
}

TEST_CASE("2D gauss-dip envelope lies below and is lattice convex") {
    const PotentialSpec p = make_potential("gauss-dip", 2);
    const ConvexEnvelope e = build_envelope(p, 3.0, 41);
    const RadialHull h = radial_hull(p, 0.0, 8.0);
    double worst = 0.0;
    for (std::size_t k = 0; k < e.size(); ++k) {
        CHECK(e.env[k] <= e.phi[k] + 1e-12);
        const Vec2 A = e.point(k);
        if (std::max(std::abs(A[0]), std::abs(A[1])) <= e.r_report) worst = std::max(worst, std::abs(e.env[k] - h.env(A)));
    }
    // exact radial hull versus the lattice transform
    CHECK(worst < 1e-2);
}

TEST_CASE("recession function of minimal surface is |v|") {
    const PotentialSpec p = make_potential("minimal-surface", 2);
    const ConvexEnvelope e = build_envelope(p, 8.0, 65);
    const RecessionTable r = recession(p, &e, 16);
    for (std::size_t k = 0; k < r.directions.size(); ++k) {
        CHECK(r.phi_inf[k] == doctest::Approx(1.0).epsilon(1e-4));
        CHECK(r.qI_inf[k] == doctest::Approx(1.0).epsilon(1e-4));
    }
}

TEST_CASE("admissibility of the catalog") {
    for (const auto& id : catalog_names(false)) {
        const PotentialSpec p = make_potential(id, 1);
        const ConvexEnvelope e = build_envelope(p, 16.0, 2001);
        const RecessionTable r = recession(p, &e, 16);
        const AdmissibilityReport a = check_admissibility(p, e, r);
        INFO(id);
        CHECK(a.structure_ok());
        CHECK(a.convex() == (id != "gauss-dip"));
    }
    const PotentialSpec dw = make_potential("double-well-test", 1);
    const ConvexEnvelope e = build_envelope(dw, 4.0, 801);
    const AdmissibilityReport a = check_admissibility(dw, e, recession(dw, &e, 16));
    CHECK_FALSE(a.structure_ok());
}

TEST_CASE("relaxed hull shrinks with eps") {
    const PotentialSpec p = make_potential("gauss-dip");
    const RadialHull h0 = radial_hull(p, 0.0, 8.0), h1 = radial_hull(p, 0.05, 8.0);
    REQUIRE(h1.intervals.size() == 1);
    CHECK(h1.intervals[0].second - h1.intervals[0].first < h0.intervals[0].second - h0.intervals[0].first);
    CHECK(h0.gap(0.5 * (h0.intervals[0].first + h0.intervals[0].second)) > 0.0);
    CHECK(h0.gap(5.0) == 0.0);
}
