#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ymflow/common.hpp"

namespace ymflow {

// Rectangular grid. Unknowns sit at the interior nodes x_i = (i+1) h,
// i = 0..n-1, with h = L/(n+1); the ghost nodes at x = 0 and x = L carry the
// homogeneous Dirichlet value. Gradients live on the n+1 "faces" per axis
// (forward differences from node i-1 to node i, ghosts included), so the
// faces tile the domain and Σ_faces h^N = |Ω|.
struct Grid {
    int dim = 1;
    std::array<double, 2> extent{1.0, 1.0};
    std::array<int, 2> cells{4, 1};

    static Grid line(int n, double L = 1.0);
    static Grid square(int n, double L = 1.0);

    void validate() const;
    double h(int axis) const { return extent[axis] / (cells[axis] + 1); }
    double hmin() const { return dim == 1 ? h(0) : std::min(h(0), h(1)); }
    int nx() const { return cells[0]; }
    int ny() const { return dim == 2 ? cells[1] : 1; }
    int fx() const { return cells[0] + 1; }
    int fy() const { return dim == 2 ? cells[1] + 1 : 1; }
    std::size_t ncells() const { return static_cast<std::size_t>(nx()) * ny(); }
    std::size_t nfaces() const { return static_cast<std::size_t>(fx()) * fy(); }
    std::size_t cell(int i, int j = 0) const { return static_cast<std::size_t>(i) + static_cast<std::size_t>(nx()) * j; }
    std::size_t face(int i, int j = 0) const { return static_cast<std::size_t>(i) + static_cast<std::size_t>(fx()) * j; }
    double cell_volume() const { return dim == 1 ? h(0) : h(0) * h(1); }
    double volume() const { return dim == 1 ? extent[0] : extent[0] * extent[1]; }
    // node coordinates of cell (i,j)
    Vec2 node(int i, int j = 0) const { return {(i + 1) * h(0), dim == 2 ? (j + 1) * h(1) : 0.0}; }
    // centre of the dual cell carried by face (i,j)
    Vec2 face_center(int i, int j = 0) const { return {(i + 0.5) * h(0), dim == 2 ? (j + 0.5) * h(1) : 0.0}; }

    bool operator==(const Grid& o) const;
    std::string describe() const;
};

struct ScalarField {
    Grid grid;
    std::vector<double> v;
    double t = 0.0;

    ScalarField() = default;
    explicit ScalarField(const Grid& g, double t0 = 0.0) : grid(g), v(g.ncells(), 0.0), t(t0) {}
    double at(int i, int j = 0) const { return v[grid.cell(i, j)]; }
    // value with the Dirichlet ghost layer
    double ghosted(int i, int j = 0) const {
        if (i < 0 || i >= grid.nx() || j < 0 || j >= grid.ny()) return 0.0;
        return v[grid.cell(i, j)];
    }
};

// Face-valued field; y is all zeros in 1D.
struct VectorField {
    Grid grid;
    std::vector<double> x, y;

    VectorField() = default;
    explicit VectorField(const Grid& g) : grid(g), x(g.nfaces(), 0.0), y(g.nfaces(), 0.0) {}
    Vec2 at(std::size_t f) const { return {x[f], y[f]}; }
    void set(std::size_t f, const Vec2& a) { x[f] = a[0]; y[f] = a[1]; }
};

struct TimeGrid {
    double T = 0.0;
    double dt = 0.0;
    int stride = 1;
    int steps() const;
    void validate() const;
};

enum class ComponentKind : std::uint8_t { Interior, Boundary, Dead };

// Kind of gradient component `axis` at face (i,j): Dead when both stencil
// nodes are ghosts, Boundary when exactly one is.
ComponentKind component_kind(const Grid& g, int i, int j, int axis);

// One boundary-crossing gradient component: the discrete piece of ∂Ω.
struct BoundarySite {
    std::size_t face;
    int axis;
    int normal;            // outward normal is normal * e_axis
    std::size_t inner;     // first interior node along the normal
    std::size_t inner2;    // second interior node
    double area;           // h^{N-1}
};
std::vector<BoundarySite> boundary_sites(const Grid& g);

// Trace u^Ω at each boundary site, linear extrapolation from the two nearest
// interior nodes to the ghost position.
std::vector<double> boundary_trace(const ScalarField& u, const std::vector<BoundarySite>& sites);

VectorField gradient(const ScalarField& u);
ScalarField divergence(const VectorField& z);
double total_variation(const ScalarField& u);

struct BVSplit {
    double threshold = 0.0;
    std::vector<std::uint8_t> singular;  // per face
    std::vector<Vec2> direction;         // ∇u/|∇u| on singular faces, 0 elsewhere
    std::size_t count() const;
};
double default_jump_threshold(const ScalarField& u);
BVSplit bv_split(const ScalarField& u, double jump_threshold);

// Discrete norms; h^N weights throughout.
double norm_l1(const ScalarField& u);
double norm_l2(const ScalarField& u);
double norm_linf(const ScalarField& u);
double grad_l1(const ScalarField& u);     // = total_variation
double grad_l2sq(const ScalarField& u);   // Σ |∇u|² h^N
double norm_w11(const ScalarField& u);    // ‖u‖_L1 + ‖∇u‖_L1
double norm_h1(const ScalarField& u);     // sqrt(‖u‖² + ‖∇u‖²)
double norm_bv(const ScalarField& u);     // ‖u‖_L1 + |Du|
double dist_l2(const ScalarField& a, const ScalarField& b);

}  // namespace ymflow
