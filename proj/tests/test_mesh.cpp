#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ymflow/kernels.hpp"
#include "ymflow/mesh.hpp"

using namespace ymflow;

namespace {

Grid grid2(int nx, int ny, double lx = 1.0, double ly = 1.0) {
    Grid g;
    g.dim = 2;
    g.cells = {nx, ny};
    g.extent = {lx, ly};
    return g;
}

ScalarField random_field(const Grid& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    ScalarField u(g);
    for (double& v : u.v) v = U(rng);
    return u;
}

// forward differences written out from the ghosted values
double oracle_gx(const ScalarField& u, int fi, int fj) {
    const double h = u.grid.h(0);
    return (u.ghosted(fi, fj - 1) - u.ghosted(fi - 1, fj - 1)) / h;
}
double oracle_gy(const ScalarField& u, int fi, int fj) {
    const double h = u.grid.h(1);
    return (u.ghosted(fi - 1, fj) - u.ghosted(fi - 1, fj - 1)) / h;
}

}  // namespace

TEST_CASE("grid geometry") {
    const Grid g = Grid::line(9, 2.0);
    CHECK(g.h(0) == doctest::Approx(0.2));
    CHECK(g.node(0)[0] == doctest::Approx(0.2));
    CHECK(g.nfaces() == 10);
    CHECK(g.nfaces() * g.cell_volume() == doctest::Approx(g.volume()));
    CHECK_THROWS_AS(Grid::line(2), Rejected);
}

TEST_CASE("2D gradient matches the stencil") {
    std::mt19937_64 rng(1);
    const Grid g = grid2(7, 5, 1.0, 2.0);
    const ScalarField u = random_field(g, rng);
    const VectorField z = gradient(u);
    for (int fj = 0; fj < g.fy(); ++fj)
        for (int fi = 0; fi < g.fx(); ++fi) {
            const std::size_t f = g.face(fi, fj);
            CHECK(z.x[f] == doctest::Approx(oracle_gx(u, fi, fj)).epsilon(1e-14));
            CHECK(z.y[f] == doctest::Approx(oracle_gy(u, fi, fj)).epsilon(1e-14));
        }
}

TEST_CASE("summation by parts") {
    std::mt19937_64 rng(2);
    for (const Grid& g : {Grid::line(33, 1.5), grid2(9, 12, 1.0, 0.5)}) {
        for (int t = 0; t < 10; ++t) {
            const ScalarField u = random_field(g, rng);
            VectorField z(g);
            std::uniform_real_distribution<double> U(-1.0, 1.0);
            for (double& v : z.x) v = U(rng);
            if (g.dim == 2)
                for (double& v : z.y) v = U(rng);
            const VectorField gu = gradient(u);
            const ScalarField dz = divergence(z);
            double lhs = 0.0, rhs = 0.0, sc = 0.0;
            for (std::size_t f = 0; f < g.nfaces(); ++f) {
                lhs += z.x[f] * gu.x[f] + z.y[f] * gu.y[f];
                sc += std::abs(z.x[f] * gu.x[f]) + std::abs(z.y[f] * gu.y[f]);
            }
            for (std::size_t k = 0; k < g.ncells(); ++k) rhs += u.v[k] * dz.v[k];
            CHECK(std::abs(lhs + rhs) <= 1e-13 * sc);
        }
    }
}

TEST_CASE("total variation of a step") {
    const Grid g = Grid::line(99);
    ScalarField u(g);
    for (int i = 0; i < g.nx(); ++i) {
        const double x = g.node(i)[0];
        u.v[i] = (x > 0.3 && x < 0.7) ? 2.5 : 0.0;
    }
    CHECK(total_variation(u) == doctest::Approx(5.0).epsilon(1e-14));
    const BVSplit s = bv_split(u, default_jump_threshold(u));
    CHECK(s.count() == 2);
}

TEST_CASE("2D total variation equals the face sum") {
    std::mt19937_64 rng(3);
    const Grid g = grid2(6, 8);
    const ScalarField u = random_field(g, rng);
    double tv = 0.0;
    for (int fj = 0; fj < g.fy(); ++fj)
        for (int fi = 0; fi < g.fx(); ++fi) tv += std::hypot(oracle_gx(u, fi, fj), oracle_gy(u, fi, fj)) * g.cell_volume();
    CHECK(total_variation(u) == doctest::Approx(tv).epsilon(1e-13));
}

TEST_CASE("boundary trace extrapolates linearly") {
    const Grid g = Grid::line(20, 1.0);
    ScalarField u(g);
    for (int i = 0; i < g.nx(); ++i) u.v[i] = 1.0 + 3.0 * g.node(i)[0];
    const auto sites = boundary_sites(g);
    REQUIRE(sites.size() == 2);
    const auto tr = boundary_trace(u, sites);
    for (std::size_t k = 0; k < sites.size(); ++k) {
        const double xb = sites[k].normal < 0 ? 0.0 : 1.0;
        CHECK(tr[k] == doctest::Approx(1.0 + 3.0 * xb).epsilon(1e-13));
    }
    const Grid g2 = grid2(5, 4);
    CHECK(boundary_sites(g2).size() == 2 * 4 + 2 * 5);
}

TEST_CASE("norms") {
    const Grid g = Grid::line(9, 1.0);
    ScalarField u(g);
    for (double& v : u.v) v = 2.0;
    CHECK(norm_l1(u) == doctest::Approx(2.0 * 9 * 0.1));
    CHECK(norm_l2(u) == doctest::Approx(std::sqrt(4.0 * 9 * 0.1)));
    CHECK(norm_linf(u) == 2.0);
    CHECK(grad_l1(u) == doctest::Approx(4.0));
    CHECK(norm_bv(u) == doctest::Approx(norm_l1(u) + 4.0));
    CHECK(dist_l2(u, u) == 0.0);
}

TEST_CASE("parallel kernels reproduce the serial reference") {
    std::mt19937_64 rng(4);
    for (const Grid& g : {Grid::line(20001), grid2(151, 133)}) {
        const ScalarField u = random_field(g, rng);
        const std::size_t nf = g.nfaces(), nc = g.ncells();
        std::vector<double> ax(nf), ay(nf), bx(nf), by(nf), da(nc), db(nc), ya(nc), yb(nc), wx(nf), wy(nf);
        kernels::serial::gradient(g, u.v.data(), ax.data(), ay.data());
        kernels::parallel::gradient(g, u.v.data(), bx.data(), by.data());
        CHECK(ax == bx);
        CHECK(ay == by);
        kernels::serial::divergence(g, ax.data(), ay.data(), da.data());
        kernels::parallel::divergence(g, ax.data(), ay.data(), db.data());
        CHECK(da == db);
        kernels::serial::shifted_laplacian(g, 0.3, u.v.data(), ya.data(), wx.data(), wy.data());
        kernels::parallel::shifted_laplacian(g, 0.3, u.v.data(), yb.data(), wx.data(), wy.data());
        CHECK(ya == yb);
        const double s = kernels::serial::dot(nc, u.v.data(), ya.data());
        const double p = kernels::parallel::dot(nc, u.v.data(), ya.data());
        CHECK(p == doctest::Approx(s).epsilon(1e-13));
        std::vector<double> za = ya, zb = ya;
        kernels::serial::axpby(nc, 0.7, u.v.data(), -1.2, za.data());
        kernels::parallel::axpby(nc, 0.7, u.v.data(), -1.2, zb.data());
        CHECK(za == zb);
    }
}

TEST_CASE("block sums do not depend on the thread count") {
    std::vector<double> v(100000);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::sin(0.37 * k);
    const double a = kernels::parallel::sum(v.size(), [&](std::size_t k) { return v[k]; });
    double b = 0.0;
    for (std::size_t lo = 0; lo < v.size(); lo += kernels::kBlock) {
        double part = 0.0;
        for (std::size_t k = lo; k < std::min(v.size(), lo + kernels::kBlock); ++k) part += v[k];
        b += part;
    }
    CHECK(a == b);
}
