#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ymflow/continuation.hpp"
#include "ymflow/young_measure.hpp"

using namespace ymflow;

namespace {

ScalarField sine(const Grid& g, double amp = 1.0) {
    ScalarField u(g);
    for (int i = 0; i < g.nx(); ++i) u.v[i] = amp * std::sin(M_PI * g.node(i)[0]);
    return u;
}

ScheduleSettings small(int jobs = 1) {
    ScheduleSettings s;
    s.time = TimeGrid{0.02, 2e-4, 25};
    s.jobs = jobs;
    return s;
}

}  // namespace

TEST_CASE("schedule validation") {
    const auto s = EpsilonSchedule::geometric(0.1, 4);
    REQUIRE(s.eps.size() == 4);
    CHECK(s.eps[3] == doctest::Approx(0.0125));
    CHECK_NOTHROW(s.validate());
    CHECK_THROWS_AS((EpsilonSchedule{{0.1, 0.05}}.validate()), Rejected);
    CHECK_THROWS_AS((EpsilonSchedule{{0.1, 0.1, 0.05}}.validate()), Rejected);
    CHECK_THROWS_AS((EpsilonSchedule{{0.1, 0.05, 1e-5}}.validate()), Rejected);
}

TEST_CASE("bundle layout and determinism across job counts") {
    const PotentialSpec p = make_potential("minimal-surface");
    const Grid g = Grid::line(63);
    const EpsilonSchedule sch{{0.1, 0.05, 0.025, 0.0125}};
    const LimitBundle a = run_schedule(sch, sine(g), p, small(1));
    const LimitBundle b = run_schedule(sch, sine(g), p, small(4));
    REQUIRE_FALSE(a.partial);
    CHECK(a.members.size() == 4);
    CHECK(a.times.size() == 5);
    CHECK(a.cauchy.size() == 3);
    CHECK(a.stack.size() == 3);
    CHECK(a.stack.front() == 1);
    CHECK(a.gradient_stack.size() == 3);
    CHECK(a.gradient_stack[0].size() == a.times.size());
    for (std::size_t k = 0; k < a.u_limit.size(); ++k) CHECK(a.u_limit[k].v == b.u_limit[k].v);
    CHECK(a.cauchy == b.cauchy);
    for (std::size_t k = 0; k < a.members.size(); ++k)
        CHECK(a.visc_decay[k] == doctest::Approx(a.members[k].norms.back().visc_cum));
}

TEST_CASE("cauchy distances against a direct computation") {
    const PotentialSpec p = make_potential("log-cosh");
    const Grid g = Grid::line(63);
    const LimitBundle b = run_schedule(EpsilonSchedule{{0.1, 0.05, 0.025}}, sine(g), p, small());
    // trapezoid in time of the squared L2 distance at checkpoints
    const auto& A = b.members[0].checkpoints;
    const auto& B = b.members[1].checkpoints;
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < A.size(); ++k) {
        const double dt = b.times[k + 1] - b.times[k];
        const double d0 = dist_l2(A[k].u, B[k].u), d1 = dist_l2(A[k + 1].u, B[k + 1].u);
        s += 0.5 * dt * (d0 * d0 + d1 * d1);
    }
    CHECK(b.cauchy[0] == doctest::Approx(std::sqrt(s)).epsilon(1e-12));
}

TEST_CASE("weak residual vanishes for a discrete divergence") {
    const Grid g = Grid::line(47);
    ScalarField u(g);
    for (int i = 0; i < g.nx(); ++i) u.v[i] = std::cos(3.0 * g.node(i)[0]) * g.node(i)[0];
    const VectorField z = gradient(u);
    const ScalarField ut = divergence(z);
    for (const ScalarField& phi : sine_dictionary(g, 5)) CHECK(std::abs(weak_residual(ut, z, phi)) < 1e-10);
}

TEST_CASE("C1 norm of the first sine mode") {
    const Grid g = Grid::line(1001);
    const auto d = sine_dictionary(g, 1);
    REQUIRE(d.size() == 1);
    CHECK(c1_norm(d[0]) == doctest::Approx(1.0 + M_PI).epsilon(1e-4));
    Grid g2 = Grid::square(15);
    CHECK(sine_dictionary(g2, 3).size() == 9);
}

TEST_CASE("weak form of the limit is small for a convex potential") {
    const PotentialSpec p = make_potential("minimal-surface");
    const Grid g = Grid::line(127);
    ScheduleSettings st;
    st.time = TimeGrid{0.05, 2e-4, 50};
    const LimitBundle b = run_schedule(EpsilonSchedule{{4e-3, 2e-3, 1e-3, 5e-4}}, sine(g), p, st);
    BinSpec bins;
    bins.r_hist = 8.0;
    std::vector<GeneralizedYoungMeasure> ms;
    for (std::size_t k = 0; k < b.times.size(); ++k) ms.push_back(estimate(b, k, bins));
    const WeakFormResidual w = weak_form_residual(b, ms, p, 4);
    CHECK(w.max_residual < 0.02);
    ms.pop_back();
    CHECK_THROWS_AS(weak_form_residual(b, ms, p, 4), Rejected);
}
