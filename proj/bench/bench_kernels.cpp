// serial vs OpenMP kernels on 2D grids, plus the lattice LF transform
#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "ymflow/kernels.hpp"
#include "ymflow/mesh.hpp"
#include "ymflow/potential.hpp"

using namespace ymflow;

namespace {

struct Fields {
    Grid g;
    std::vector<double> u, gx, gy, out, wx, wy;
    explicit Fields(int n) : g(Grid::square(n)) {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> d(-1.0, 1.0);
        u.resize(g.ncells());
        for (auto& v : u) v = d(rng);
        gx.assign(g.nfaces(), 0.0);
        gy.assign(g.nfaces(), 0.0);
        wx = gx;
        wy = gy;
        out.assign(g.ncells(), 0.0);
    }
};

template <bool Par>
void BM_gradient(benchmark::State& st) {
    Fields f(static_cast<int>(st.range(0)));
    for (auto _ : st) {
        if constexpr (Par) kernels::parallel::gradient(f.g, f.u.data(), f.gx.data(), f.gy.data());
        else kernels::serial::gradient(f.g, f.u.data(), f.gx.data(), f.gy.data());
        benchmark::DoNotOptimize(f.gx.data());
    }
    st.SetItemsProcessed(st.iterations() * static_cast<long>(f.g.nfaces()));
}

template <bool Par>
void BM_divergence(benchmark::State& st) {
    Fields f(static_cast<int>(st.range(0)));
    kernels::serial::gradient(f.g, f.u.data(), f.gx.data(), f.gy.data());
    for (auto _ : st) {
        if constexpr (Par) kernels::parallel::divergence(f.g, f.gx.data(), f.gy.data(), f.out.data());
        else kernels::serial::divergence(f.g, f.gx.data(), f.gy.data(), f.out.data());
        benchmark::DoNotOptimize(f.out.data());
    }
    st.SetItemsProcessed(st.iterations() * static_cast<long>(f.g.ncells()));
}

template <bool Par>
void BM_shifted_laplacian(benchmark::State& st) {
    Fields f(static_cast<int>(st.range(0)));
    for (auto _ : st) {
        if constexpr (Par)
            kernels::parallel::shifted_laplacian(f.g, 1e-3, f.u.data(), f.out.data(), f.wx.data(), f.wy.data());
        else
            kernels::serial::shifted_laplacian(f.g, 1e-3, f.u.data(), f.out.data(), f.wx.data(), f.wy.data());
        benchmark::DoNotOptimize(f.out.data());
    }
    st.SetItemsProcessed(st.iterations() * static_cast<long>(f.g.ncells()));
}

template <bool Par>
void BM_dot(benchmark::State& st) {
    Fields f(static_cast<int>(st.range(0)));
    for (auto _ : st) {
        double s = Par ? kernels::parallel::dot(f.u.size(), f.u.data(), f.u.data())
                       : kernels::serial::dot(f.u.size(), f.u.data(), f.u.data());
        benchmark::DoNotOptimize(s);
    }
    st.SetItemsProcessed(st.iterations() * static_cast<long>(f.u.size()));
}

template <bool Par>
void BM_legendre_2d(benchmark::State& st) {
    const int m = static_cast<int>(st.range(0));
    std::vector<double> axis(m), vals(static_cast<std::size_t>(m) * m);
    for (int i = 0; i < m; ++i) axis[i] = -4.0 + 8.0 * i / (m - 1);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) {
            double r2 = axis[i] * axis[i] + axis[j] * axis[j];
            vals[static_cast<std::size_t>(j) * m + i] = std::sqrt(1.0 + r2) - std::exp(-r2);
        }
    for (auto _ : st) {
        auto e = convexify_nd(axis, vals, 1.5, 0.25, 1e-8, Par);
        benchmark::DoNotOptimize(e.env.data());
    }
}

}  // namespace

BENCHMARK(BM_gradient<false>)->Name("gradient/serial")->Arg(255)->Arg(1023);
BENCHMARK(BM_gradient<true>)->Name("gradient/parallel")->Arg(255)->Arg(1023);
BENCHMARK(BM_divergence<false>)->Name("divergence/serial")->Arg(255)->Arg(1023);
BENCHMARK(BM_divergence<true>)->Name("divergence/parallel")->Arg(255)->Arg(1023);
BENCHMARK(BM_shifted_laplacian<false>)->Name("shifted_laplacian/serial")->Arg(255)->Arg(1023);
BENCHMARK(BM_shifted_laplacian<true>)->Name("shifted_laplacian/parallel")->Arg(255)->Arg(1023);
BENCHMARK(BM_dot<false>)->Name("dot/serial")->Arg(255)->Arg(1023);
BENCHMARK(BM_dot<true>)->Name("dot/parallel")->Arg(255)->Arg(1023);
BENCHMARK(BM_legendre_2d<false>)->Name("legendre_2d/serial")->Arg(65)->Arg(129)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_legendre_2d<true>)->Name("legendre_2d/parallel")->Arg(65)->Arg(129)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
