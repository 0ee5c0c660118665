#include "ymflow/mesh.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <sstream>

#include "ymflow/kernels.hpp"

namespace ymflow {

Grid Grid::line(int n, double L) {
    Grid g;
    g.dim = 1;
    g.extent = {L, 1.0};
    g.cells = {n, 1};
    g.validate();
    return g;
}

Grid Grid::square(int n, double L) {
    Grid g;
    g.dim = 2;
    g.extent = {L, L};
    g.cells = {n, n};
    g.validate();
    return g;
}

void Grid::validate() const {
    if (dim != 1 && dim != 2) throw Rejected("grid: dim must be 1 or 2");
    for (int a = 0; a < dim; ++a) {
        if (cells[a] < 4) throw Rejected("grid: need at least 4 cells per axis");
        if (!(extent[a] > 0.0) || !std::isfinite(extent[a])) throw Rejected("grid: extent must be positive");
    }
}

bool Grid::operator==(const Grid& o) const {
    if (dim != o.dim) return false;
    for (int a = 0; a < dim; ++a)
        if (cells[a] != o.cells[a] || extent[a] != o.extent[a]) return false;
    return true;
}

std::string Grid::describe() const {
    std::ostringstream s;
    s << dim << "D ";
    for (int a = 0; a < dim; ++a) s << (a ? "x" : "") << cells[a];
    s << " cells, h=" << h(0);
    return s.str();
}

int TimeGrid::steps() const {
    return static_cast<int>(std::llround(T / dt));
}

void TimeGrid::validate() const {
    if (!(dt > 0.0) || !(T >= 0.0)) throw Rejected("time grid: need dt > 0, T >= 0");
    if (stride < 1) throw Rejected("time grid: checkpoint stride must be >= 1");
    if (std::abs(steps() * dt - T) > 1e-9 * std::max(1.0, T)) throw Rejected("time grid: T must be a multiple of dt");
}

ComponentKind component_kind(const Grid& g, int i, int j, int axis) {
    if (g.dim == 1) {
        if (axis == 1) return ComponentKind::Dead;
        return (i == 0 || i == g.nx()) ? ComponentKind::Boundary : ComponentKind::Interior;
    }
    // stencil of the x component: nodes (i-1, j-1), (i, j-1)
    if (axis == 0) {
        if (j == 0) return ComponentKind::Dead;
        return (i == 0 || i == g.nx()) ? ComponentKind::Boundary : ComponentKind::Interior;
    }
    if (i == 0) return ComponentKind::Dead;
    return (j == 0 || j == g.ny()) ? ComponentKind::Boundary : ComponentKind::Interior;
}

std::vector<BoundarySite> boundary_sites(const Grid& g) {
    std::vector<BoundarySite> s;
    const int nx = g.nx(), ny = g.ny();
    if (g.dim == 1) {
        s.push_back({g.face(0), 0, -1, g.cell(0), g.cell(1), 1.0});
        s.push_back({g.face(nx), 0, +1, g.cell(nx - 1), g.cell(nx - 2), 1.0});
        return s;
    }
    for (int j = 0; j < ny; ++j) {
        s.push_back({g.face(0, j + 1), 0, -1, g.cell(0, j), g.cell(1, j), g.h(1)});
        s.push_back({g.face(nx, j + 1), 0, +1, g.cell(nx - 1, j), g.cell(nx - 2, j), g.h(1)});
    }
    for (int i = 0; i < nx; ++i) {
        s.push_back({g.face(i + 1, 0), 1, -1, g.cell(i, 0), g.cell(i, 1), g.h(0)});
        s.push_back({g.face(i + 1, ny), 1, +1, g.cell(i, ny - 1), g.cell(i, ny - 2), g.h(0)});
    }
    return s;
}

std::vector<double> boundary_trace(const ScalarField& u, const std::vector<BoundarySite>& sites) {
    std::vector<double> tr(sites.size());
    for (std::size_t k = 0; k < sites.size(); ++k) tr[k] = 2.0 * u.v[sites[k].inner] - u.v[sites[k].inner2];
    return tr;
}

VectorField gradient(const ScalarField& u) {
    VectorField z(u.grid);
    kernels::parallel::gradient(u.grid, u.v.data(), z.x.data(), z.y.data());
    return z;
}

ScalarField divergence(const VectorField& z) {
    ScalarField d(z.grid);
    kernels::parallel::divergence(z.grid, z.x.data(), z.y.data(), d.v.data());
    return d;
}

double total_variation(const ScalarField& u) {
    const VectorField g = gradient(u);
    const double w = u.grid.cell_volume();
    return w * kernels::parallel::sum(g.x.size(), [&](std::size_t f) { return std::hypot(g.x[f], g.y[f]); });
}

std::size_t BVSplit::count() const {
    return static_cast<std::size_t>(std::count(singular.begin(), singular.end(), std::uint8_t{1}));
}

double default_jump_threshold(const ScalarField& u) {
    const VectorField g = gradient(u);
    std::vector<double> m(g.x.size());
    double mean = 0.0;
    for (std::size_t f = 0; f < m.size(); ++f) {
        m[f] = std::hypot(g.x[f], g.y[f]);
        mean += m[f];
    }
    mean /= static_cast<double>(m.size());
    auto mid = m.begin() + static_cast<long>(m.size() / 2);
    std::nth_element(m.begin(), mid, m.end());
    return std::max(10.0 * u.grid.hmin() * std::max(*mid, mean), DBL_MIN);
}

BVSplit bv_split(const ScalarField& u, double jump_threshold) {
    if (!(jump_threshold > 0.0)) throw Rejected("bv_split: jump threshold must be positive");
    const VectorField g = gradient(u);
    BVSplit out;
    out.threshold = jump_threshold;
    out.singular.assign(g.x.size(), 0);
    out.direction.assign(g.x.size(), Vec2{0.0, 0.0});
    const double h = u.grid.hmin();
    for (std::size_t f = 0; f < g.x.size(); ++f) {
        const double m = std::hypot(g.x[f], g.y[f]);
        if (m * h > jump_threshold) {
            out.singular[f] = 1;
            out.direction[f] = {g.x[f] / m, g.y[f] / m};
        }
    }
    return out;
}

double norm_l1(const ScalarField& u) {
    return u.grid.cell_volume() * kernels::parallel::sum(u.v.size(), [&](std::size_t i) { return std::abs(u.v[i]); });
}

double norm_l2(const ScalarField& u) {
    return std::sqrt(u.grid.cell_volume() * kernels::parallel::sum(u.v.size(), [&](std::size_t i) { return u.v[i] * u.v[i]; }));
}

double norm_linf(const ScalarField& u) {
    return kernels::parallel::max(u.v.size(), [&](std::size_t i) { return std::abs(u.v[i]); });
}

double grad_l1(const ScalarField& u) { return total_variation(u); }

double grad_l2sq(const ScalarField& u) {
    const VectorField g = gradient(u);
    return u.grid.cell_volume() *
           kernels::parallel::sum(g.x.size(), [&](std::size_t f) { return g.x[f] * g.x[f] + g.y[f] * g.y[f]; });
}

double norm_w11(const ScalarField& u) { return norm_l1(u) + grad_l1(u); }

double norm_h1(const ScalarField& u) {
    const double a = norm_l2(u);
    return std::sqrt(a * a + grad_l2sq(u));
}

double norm_bv(const ScalarField& u) { return norm_l1(u) + total_variation(u); }

double dist_l2(const ScalarField& a, const ScalarField& b) {
    if (!(a.grid == b.grid)) throw Rejected("dist_l2: grid mismatch");
    return std::sqrt(a.grid.cell_volume() *
                     kernels::parallel::sum(a.v.size(), [&](std::size_t i) { double d = a.v[i] - b.v[i]; return d * d; }));
}

}  // namespace ymflow
