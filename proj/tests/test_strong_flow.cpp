#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ymflow/continuation.hpp"
#include "ymflow/strong_flow.hpp"
#include "ymflow/young_measure.hpp"

using namespace ymflow;

namespace {

Grid square(int n) {
    Grid g;
    g.dim = 2;
    g.cells = {n, n};
    g.extent = {1.0, 1.0};
    return g;
}

double bump(double x) { return x > 0.2 && x < 0.8 ? std::pow(std::sin(M_PI * (x - 0.2) / 0.6), 2) : 0.0; }

}  // namespace

TEST_CASE("Green formula is exact for a constant field and an interior bump") {
    for (const Grid& g : {Grid::line(63), square(31)}) {
        ScalarField u(g);
        VectorField z(g);
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) {
                const Vec2 x = g.node(i, j);
                u.v[g.cell(i, j)] = bump(x[0]) * (g.dim == 2 ? bump(x[1]) : 1.0);
            }
        for (std::size_t f = 0; f < g.nfaces(); ++f) z.set(f, {0.6, g.dim == 2 ? -0.3 : 0.0});
        const AnzellottiReport r = anzellotti_pair(z, u);
        CHECK(r.green_residual <= 1e-10);
        CHECK(r.pair_class == "b");
        CHECK(r.z_inf == doctest::Approx(g.dim == 2 ? std::hypot(0.6, 0.3) : 0.6));
        CHECK(r.box_excess <= 1e-12);
        CHECK(r.trace_excess <= 1e-12);
        CHECK(r.boxes > 0);
    }
}

TEST_CASE("pairing masses add up to the face sum of z.Du") {
    const Grid g = Grid::line(63);
    ScalarField u(g);
    VectorField z(g);
    for (int i = 0; i < g.nx(); ++i) u.v[i] = bump(g.node(i)[0]);
    const VectorField gu = gradient(u);
    double face = 0.0;
    for (std::size_t f = 0; f < g.nfaces(); ++f) {
        z.x[f] = std::tanh(gu.x[f]);
        face += z.x[f] * gu.x[f] * g.h(0);
    }
    const AnzellottiReport r = anzellotti_pair(z, u);
    double total = 0.0;
    for (double d : r.pairing_density) total += d;  // per-cell masses
    CHECK(total == doctest::Approx(face).epsilon(1e-12));
}

TEST_CASE("prox of zero data is zero") {
    const PotentialSpec p = make_potential("minimal-surface");
    const ProxSolver P = make_prox(p);
    const Grid g = Grid::line(31);
    VectorField dual(g);
    const ScalarField u = prox_step(ScalarField(g), 1e-2, P, dual);
    for (double v : u.v) CHECK(v == 0.0);
}

TEST_CASE("prox tends to the identity as dt shrinks") {
    const PotentialSpec p = make_potential("log-cosh");
    const ProxSolver P = make_prox(p);
    const Grid g = Grid::line(63);
    ScalarField u(g);
    for (int i = 0; i < g.nx(); ++i) u.v[i] = std::sin(M_PI * g.node(i)[0]);
    double prev = 1e300;
    for (double dt : {1e-3, 1e-4, 1e-5}) {
        VectorField dual(g);
        const ScalarField v = prox_step(u, dt, P, dual);
        const double d = dist_l2(u, v);
        // |v-u| <= dt |div p| and |div p| <= 2 Λ / h per node
        CHECK(d <= dt * 2.0 / g.h(0) + 1e-12);
        CHECK(d < prev);
        prev = d;
    }
}

TEST_CASE("prox optimality: (v-u)/dt = div p(grad v)") {
    const PotentialSpec p = make_potential("minimal-surface");
    const ProxSolver P = make_prox(p);
    const Grid g = Grid::line(63);
    ScalarField u(g);
    for (int i = 0; i < g.nx(); ++i) u.v[i] = 2.0 * std::sin(M_PI * g.node(i)[0]);
    const double dt = 1e-3;
    VectorField dual(g);
    const ScalarField v = prox_step(u, dt, P, dual);
    const VectorField gv = gradient(v);
    VectorField z(g);
    for (std::size_t f = 0; f < g.nfaces(); ++f) z.x[f] = gv.x[f] / std::sqrt(1.0 + gv.x[f] * gv.x[f]);
    const ScalarField dz = divergence(z);
    double worst = 0.0;
    for (int i = 0; i < g.nx(); ++i) worst = std::max(worst, std::abs((v.v[i] - u.v[i]) / dt - dz.v[i]));
    CHECK(worst < 1e-4);
}

TEST_CASE("strong solver rejects what it cannot handle") {
    CHECK_THROWS_AS(make_prox(make_potential("linear-test")), Rejected);
}

TEST_CASE("strong flow dissipates energy and keeps a jump") {
    const PotentialSpec p = make_potential("minimal-surface");
    const ProxSolver P = make_prox(p);
    const Grid g = Grid::line(63);
    ScalarField u(g);
    for (int i = 0; i < g.nx(); ++i) u.v[i] = std::abs(g.node(i)[0] - 0.5) < 0.2 ? 1.0 : 0.0;
    const StrongTrajectory tr = solve_strong(u, p, TimeGrid{0.02, 4e-4, 25}, P);
    CHECK(tr.max_energy_increase <= 1e-10 * tr.energy.front());
    CHECK(tr.energy.back() < tr.energy.front());
    REQUIRE(tr.certificates.size() == tr.times.size());
    for (const auto& c : tr.certificates) {
        CHECK(c.singular_faces >= 1);
        CHECK(c.d52_residual <= 0.05 * c.singular_mass);
    }
    CHECK(envelope_energy(u, P) == doctest::Approx(tr.energy.front()));
}

TEST_CASE("equivalence refuses a nonconvex potential") {
    const PotentialSpec p = make_potential("gauss-dip");
    const Grid g = Grid::line(31);
    ScalarField u(g);
    for (int i = 0; i < g.nx(); ++i) u.v[i] = std::sin(M_PI * g.node(i)[0]);
    ScheduleSettings st;
    st.time = TimeGrid{0.004, 4e-4, 5};
    const LimitBundle b = run_schedule(EpsilonSchedule{{0.1, 0.05, 0.025}}, u, p, st);
    const PotentialSpec ms = make_potential("minimal-surface");
    const ProxSolver P = make_prox(ms);
    const StrongTrajectory tr = solve_strong(u, ms, TimeGrid{0.004, 4e-4, 5}, P);
    std::vector<GeneralizedYoungMeasure> m;
    for (std::size_t k = 0; k < b.times.size(); ++k) m.push_back(estimate(b, k, BinSpec{}));
    CHECK_THROWS_AS(compare_equivalence(b, m, tr, p, make_prox(p)), Rejected);
}
