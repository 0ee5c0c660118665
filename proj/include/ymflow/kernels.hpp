#pragma once

// Data-parallel building blocks. Every kernel comes in two flavours:
//   serial::   plain loops, the reference used by tests
//   parallel:: OpenMP version used by the solvers
// Reductions in parallel:: use fixed blocks summed in block order, so
// results do not depend on the thread count.

#include <algorithm>
#include <cstddef>
#include <vector>

#include "ymflow/common.hpp"

namespace ymflow {

struct Grid;

namespace kernels {

inline constexpr std::size_t kBlock = 1024;
// below this many entries the OpenMP regions are skipped
inline constexpr std::size_t kParallelMin = 8192;

namespace serial {
void gradient(const Grid& g, const double* u, double* gx, double* gy);
void divergence(const Grid& g, const double* zx, const double* zy, double* out);
double dot(std::size_t n, const double* a, const double* b);
void axpby(std::size_t n, double a, const double* x, double b, double* y);
// y = x - c * div(grad x)
void shifted_laplacian(const Grid& g, double c, const double* x, double* y, double* wx, double* wy);
}  // namespace serial

namespace parallel {
void gradient(const Grid& g, const double* u, double* gx, double* gy);
void divergence(const Grid& g, const double* zx, const double* zy, double* out);
double dot(std::size_t n, const double* a, const double* b);
void axpby(std::size_t n, double a, const double* x, double b, double* y);
void shifted_laplacian(const Grid& g, double c, const double* x, double* y, double* wx, double* wy);

// Block-ordered sum of f(i), i in [0,n). Deterministic for any thread count.
template <class F>
double sum(std::size_t n, F&& f) {
    const std::size_t nb = (n + kBlock - 1) / kBlock;
    std::vector<double> part(nb, 0.0);
#pragma omp parallel for schedule(static) if (n >= kParallelMin)
    for (long b = 0; b < static_cast<long>(nb); ++b) {
        double s = 0.0;
        const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
        const std::size_t hi = std::min(n, lo + kBlock);
        for (std::size_t i = lo; i < hi; ++i) s += f(i);
        part[b] = s;
    }
    double s = 0.0;
    for (double p : part) s += p;
    return s;
}

template <class F>
double max(std::size_t n, F&& f) {
    double m = 0.0;
#pragma omp parallel for reduction(max : m) if (n >= kParallelMin)
    for (long i = 0; i < static_cast<long>(n); ++i) m = std::max(m, f(static_cast<std::size_t>(i)));
    return m;
}

template <class F>
void for_each(std::size_t n, F&& f) {
#pragma omp parallel for schedule(static) if (n >= kParallelMin)
    for (long i = 0; i < static_cast<long>(n); ++i) f(static_cast<std::size_t>(i));
}
}  // namespace parallel

}  // namespace kernels
}  // namespace ymflow
