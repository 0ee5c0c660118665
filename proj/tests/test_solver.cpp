#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ymflow/regularized_solver.hpp"

using namespace ymflow;

namespace {

ScalarField sine(const Grid& g, double amp = 1.0, int mode = 1) {
    ScalarField u(g);
    for (int i = 0; i < g.nx(); ++i) u.v[i] = amp * std::sin(mode * M_PI * g.node(i)[0] / g.extent[0]);
    return u;
}

}  // namespace

TEST_CASE("heat equation against the exact mode decay") {
    const FluxModel F = make_flux(make_potential("zero-flux-test"), FluxMode::Raw, 1.0);
    const Grid g = Grid::line(127);
    const ScalarField u0 = sine(g);
    const double T = 0.05;
    const Trajectory tr = solve(u0, 1.0, F, TimeGrid{T, 1e-4, 100});
    // the discrete sine mode is an eigenvector: backward Euler decay is exact for the scheme
    const double h = g.h(0);
    const double lam = 4.0 / (h * h) * std::pow(std::sin(M_PI * h / 2.0), 2);
    const double disc = std::pow(1.0 / (1.0 + 1e-4 * lam), 500);
    const ScalarField& u = tr.checkpoints.back().u;
    for (int i = 0; i < g.nx(); ++i) CHECK(u.v[i] == doctest::Approx(disc * u0.v[i]).epsilon(1e-9));
    CHECK(std::abs(disc - std::exp(-M_PI * M_PI * T)) < 5e-3);
}

TEST_CASE("explicit step above the stability bound is rejected") {
    const PotentialSpec p = make_potential("minimal-surface");
    const FluxModel F = make_flux(p, FluxMode::Raw, 0.1);
    const Grid g = Grid::line(63);
    const double dm = dt_max(g, F);
    const double h = g.h(0);
    CHECK(dm == doctest::Approx(std::min(h / 4.0, h * h / 2.0)));
    CHECK_THROWS_AS(step(sine(g), F, 1.01 * dm, {}), Rejected);
    CHECK_NOTHROW(step(sine(g), F, dm, {}));
}

TEST_CASE("maximum principle and energy decay") {
    for (const char* id : {"minimal-surface", "log-cosh", "gauss-dip"}) {
        const PotentialSpec p = make_potential(id);
        const FluxModel F = make_flux(p, FluxMode::Raw, 0.05);
        const Grid g = Grid::line(127);
        const Trajectory tr = solve(sine(g, 2.0), 0.05, F, TimeGrid{0.05, 2e-4, 50});
        INFO(id);
        CHECK(tr.max_linf_excess <= 1e-12);
        CHECK(tr.max_energy_increase <= 1e-12 * tr.e0);
        for (std::size_t k = 1; k < tr.norms.size(); ++k) CHECK(tr.norms[k].energy <= tr.norms[k - 1].energy + 1e-12);
    }
}

TEST_CASE("relaxed flux is the laminate average of q") {
    const PotentialSpec p = make_potential("gauss-dip");
    const double eps = 1e-3;
    const FluxModel F = make_flux(p, FluxMode::Relaxed, eps, 16.0);
    REQUIRE(F.hull);
    REQUIRE(F.hull->intervals.size() == 1);
    for (double a = -6.0; a <= 6.0; a += 0.01) {
        Atom at[2];
        const int n = F.atoms({a, 0.0}, at);
        double w = 0.0, bar = 0.0, avg = 0.0;
        for (int k = 0; k < n; ++k) {
            w += at[k].w;
            bar += at[k].w * at[k].loc[0];
            avg += at[k].w * p.grad(at[k].loc)[0];
            CHECK(at[k].w >= 0.0);
        }
        CHECK(w == doctest::Approx(1.0));
        CHECK(bar == doctest::Approx(a).epsilon(1e-12));
        CHECK(F.flux({a, 0.0})[0] == doctest::Approx(avg).epsilon(1e-7));
        if (n == 2) CHECK(std::abs(a) > F.hull->intervals[0].first);
    }
}

TEST_CASE("mollified data vanishes at the boundary and keeps the bounds") {
    const Grid g = Grid::line(255);
    ScalarField u0(g);
    for (int i = 0; i < g.nx(); ++i) u0.v[i] = 1.0;  // trace jumps at both ends
    const MollifiedInitialData d = mollify_initial(u0, 0.01);
    CHECK(d.linf <= d.linf_source + 1e-14);
    CHECK(std::abs(d.u0_eps.v.front()) < 0.2);
    CHECK(std::abs(d.u0_eps.v.back()) < 0.2);
    CHECK(std::abs(d.u0_eps.v[g.nx() / 2] - 1.0) < 1e-12);
    CHECK(d.width > 0.0);
}

TEST_CASE("shifted Laplacian solve") {
    const Grid g = Grid::line(63);
    StepWork w(g);
    std::vector<double> b(g.ncells()), x(g.ncells(), 0.0);
    const ScalarField s = sine(g, 1.0, 3);
    const double h = g.h(0), c = 0.01;
    const double lam = 4.0 / (h * h) * std::pow(std::sin(3 * M_PI * h / 2.0), 2);
    for (std::size_t k = 0; k < b.size(); ++k) b[k] = (1.0 + c * lam) * s.v[k];
    double res = 1.0;
    solve_shifted(g, c, b, x, w, {}, &res);
    for (std::size_t k = 0; k < b.size(); ++k) CHECK(x[k] == doctest::Approx(s.v[k]).epsilon(1e-8));
}

TEST_CASE("bounds report") {
    const PotentialSpec p = make_potential("minimal-surface");
    const Grid g = Grid::line(63);
    const ScalarField u0 = sine(g);
    std::vector<Trajectory> trs;
    for (double e : {0.1, 0.05, 0.025}) {
        const FluxModel F = make_flux(p, FluxMode::Raw, e);
        trs.push_back(solve(mollify_initial(u0, e), F, TimeGrid{0.05, 4e-4, 25}));
    }
    const double M = bounds_budget(u0, p, 4.0);
    // M = C_M (1 + BV + Linf + |Ω|) Λ/λ
    CHECK(M == doctest::Approx(4.0 * (1.0 + norm_bv(u0) + norm_linf(u0) + 1.0)));
    const BoundsReport r = verify_lemma25(trs, M);
    CHECK(r.sups.size() == 3);
    CHECK(r.bounded[0]);
    CHECK_THROWS_AS(verify_lemma25({trs[0], trs[1]}, M), Rejected);
}
