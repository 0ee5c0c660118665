#include "ymflow/kernels.hpp"

#include "ymflow/mesh.hpp"

namespace ymflow::kernels {

namespace {

// Shared stencil bodies; the two namespaces differ only in the loop driver.
inline double ghost(const Grid& g, const double* u, int i, int j) {
    if (i < 0 || i >= g.nx() || j < 0 || j >= g.ny()) return 0.0;
    return u[g.cell(i, j)];
}

inline void grad_row(const Grid& g, const double* u, double* gx, double* gy, int fj) {
    const int fx = g.fx();
    if (g.dim == 1) {
        const double ih = 1.0 / g.h(0);
        for (int fi = 0; fi < fx; ++fi) {
            gx[fi] = (ghost(g, u, fi, 0) - ghost(g, u, fi - 1, 0)) * ih;
            gy[fi] = 0.0;
        }
        return;
    }
    const double ihx = 1.0 / g.h(0), ihy = 1.0 / g.h(1);
    for (int fi = 0; fi < fx; ++fi) {
        const double base = ghost(g, u, fi - 1, fj - 1);
        const std::size_t f = g.face(fi, fj);
        gx[f] = (ghost(g, u, fi, fj - 1) - base) * ihx;
        gy[f] = (ghost(g, u, fi - 1, fj) - base) * ihy;
    }
}

inline void div_row(const Grid& g, const double* zx, const double* zy, double* out, int j) {
    const int nx = g.nx();
    if (g.dim == 1) {
        const double ih = 1.0 / g.h(0);
        for (int i = 0; i < nx; ++i) out[i] = (zx[i + 1] - zx[i]) * ih;
        return;
    }
    const double ihx = 1.0 / g.h(0), ihy = 1.0 / g.h(1);
    for (int i = 0; i < nx; ++i) {
        const std::size_t p = g.face(i + 1, j + 1);
        out[g.cell(i, j)] = (zx[p] - zx[g.face(i, j + 1)]) * ihx + (zy[p] - zy[g.face(i + 1, j)]) * ihy;
    }
}

}  // namespace

namespace serial {

void gradient(const Grid& g, const double* u, double* gx, double* gy) {
    for (int fj = 0; fj < g.fy(); ++fj) grad_row(g, u, gx, gy, fj);
}

void divergence(const Grid& g, const double* zx, const double* zy, double* out) {
    for (int j = 0; j < g.ny(); ++j) div_row(g, zx, zy, out, j);
}

double dot(std::size_t n, const double* a, const double* b) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpby(std::size_t n, double a, const double* x, double b, double* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

void shifted_laplacian(const Grid& g, double c, const double* x, double* y, double* wx, double* wy) {
    gradient(g, x, wx, wy);
    divergence(g, wx, wy, y);
    const std::size_t n = g.ncells();
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] - c * y[i];
}

}  // namespace serial

namespace parallel {

void gradient(const Grid& g, const double* u, double* gx, double* gy) {
    if (g.dim == 1) {
        grad_row(g, u, gx, gy, 0);
        return;
    }
    const int fy = g.fy();
#pragma omp parallel for schedule(static) if (g.nfaces() >= kParallelMin)
    for (int fj = 0; fj < fy; ++fj) grad_row(g, u, gx, gy, fj);
}

void divergence(const Grid& g, const double* zx, const double* zy, double* out) {
    if (g.dim == 1) {
        div_row(g, zx, zy, out, 0);
        return;
    }
    const int ny = g.ny();
#pragma omp parallel for schedule(static) if (g.ncells() >= kParallelMin)
    for (int j = 0; j < ny; ++j) div_row(g, zx, zy, out, j);
}

double dot(std::size_t n, const double* a, const double* b) {
    return sum(n, [&](std::size_t i) { return a[i] * b[i]; });
}

void axpby(std::size_t n, double a, const double* x, double b, double* y) {
    for_each(n, [&](std::size_t i) { y[i] = a * x[i] + b * y[i]; });
}

void shifted_laplacian(const Grid& g, double c, const double* x, double* y, double* wx, double* wy) {
    gradient(g, x, wx, wy);
    divergence(g, wx, wy, y);
    for_each(g.ncells(), [&](std::size_t i) { y[i] = x[i] - c * y[i]; });
}

}  // namespace parallel

}  // namespace ymflow::kernels
