#include "ymflow/regularized_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ymflow/kernels.hpp"

namespace ymflow {

std::string to_string(FluxMode m) {
    switch (m) {
        case FluxMode::Raw: return "raw";
        case FluxMode::Envelope: return "envelope";
        case FluxMode::Relaxed: return "relaxed";
    }
    return "raw";
}

FluxMode flux_mode_from_string(const std::string& s) {
    if (s == "raw") return FluxMode::Raw;
    if (s == "envelope") return FluxMode::Envelope;
    if (s == "relaxed") return FluxMode::Relaxed;
    throw Rejected("unknown flux mode '" + s + "' (raw|envelope|relaxed)");
}

FluxModel make_flux(const PotentialSpec& spec, FluxMode mode, double eps, double r_max, int hull_samples) {
    if (eps < 0.0) throw Rejected("flux: eps must be nonnegative");
    FluxModel F;
    F.spec = spec;
    F.mode = mode;
    F.eps = eps;
    if (mode != FluxMode::Raw) {
        if (r_max <= 0.0) r_max = 32.0;
        F.hull = radial_hull(spec, mode == FluxMode::Relaxed ? eps : 0.0, r_max, hull_samples);
        if (!F.hull->reliable) throw Rejected("flux: envelope of '" + spec.id + "' not resolved inside r_max");
    }
    return F;
}

Vec2 FluxModel::flux(const Vec2& A) const {
    switch (mode) {
        case FluxMode::Raw: return spec.grad(A);
        case FluxMode::Envelope: return hull->slope(A);
        case FluxMode::Relaxed: {
            Vec2 p = hull->slope(A);
            return {p[0] - eps * A[0], p[1] - eps * A[1]};
        }
    }
    return {0.0, 0.0};
}

double FluxModel::energy_density(const Vec2& A) const {
    switch (mode) {
        case FluxMode::Raw: return spec.eval(A) + 0.5 * eps * dot(A, A);
        case FluxMode::Envelope: return hull->env(A) + 0.5 * eps * dot(A, A);
        case FluxMode::Relaxed: return hull->env(A);
    }
    return 0.0;
}

int FluxModel::atoms(const Vec2& A, Atom out[2]) const {
    if (mode == FluxMode::Raw) {
        out[0] = {A, 1.0};
        return 1;
    }
    const double r = norm(A);
    const int k = hull->piece(r);
    if (k < 0) {
        out[0] = {A, 1.0};
        return 1;
    }
    const Vec2 e = r > 0.0 ? (1.0 / r) * A : Vec2{1.0, 0.0};
    const auto [c1, c2] = hull->intervals[k];
    const double th = (c2 - r) / (c2 - c1);
    out[0] = {c1 * e, th};
    out[1] = {c2 * e, 1.0 - th};
    return 2;
}

double FluxModel::lip() const { return mode == FluxMode::Relaxed ? std::max(spec.flux_lip, eps) : spec.flux_lip; }

double FluxModel::flux_bound() const { return spec.lambda_hi; }

double dt_max(const Grid& g, const FluxModel& F) {
    const double h = g.hmin();
    const int N = g.dim;
    const double inf = std::numeric_limits<double>::infinity();
    const double L = F.flux_bound(), lip = F.lip();
    const double a = L > 0.0 ? h / (4.0 * N * L) : inf;
    const double b = lip > 0.0 ? h * h / (2.0 * N * lip) : inf;
    return std::min(a, b);
}

StepWork::StepWork(const Grid& g)
    : grad(g), flux(g), rhs(g.ncells()), r(g.ncells()), p(g.ncells()), Ap(g.ncells()), wx(g.nfaces()), wy(g.nfaces()) {}

int solve_shifted(const Grid& g, double c, const std::vector<double>& b, std::vector<double>& x, StepWork& w,
                  const SolverSettings& s, double* residual) {
    namespace K = kernels::parallel;
    const std::size_t n = g.ncells();
    x = b;
    if (c == 0.0) {
        if (residual) *residual = 0.0;
        return 0;
    }
    const double bn = std::sqrt(K::dot(n, b.data(), b.data()));
    if (bn == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        if (residual) *residual = 0.0;
        return 0;
    }
    K::shifted_laplacian(g, c, x.data(), w.Ap.data(), w.wx.data(), w.wy.data());
    for (std::size_t i = 0; i < n; ++i) w.r[i] = b[i] - w.Ap[i];
    w.p = w.r;
    double rs = K::dot(n, w.r.data(), w.r.data());
    const int cap = s.cg_cap_factor * static_cast<int>(n);
    int it = 0;
    while (std::sqrt(rs) > s.cg_tol * bn) {
        if (it >= cap)
            throw SolverFailure("CG did not converge in " + std::to_string(cap) + " iterations, relative residual " +
                                std::to_string(std::sqrt(rs) / bn));
        K::shifted_laplacian(g, c, w.p.data(), w.Ap.data(), w.wx.data(), w.wy.data());
        const double alpha = rs / K::dot(n, w.p.data(), w.Ap.data());
        K::for_each(n, [&](std::size_t i) {
            x[i] += alpha * w.p[i];
            w.r[i] -= alpha * w.Ap[i];
        });
        const double rs2 = K::dot(n, w.r.data(), w.r.data());
        K::axpby(n, 1.0, w.r.data(), rs2 / rs, w.p.data());
        rs = rs2;
        ++it;
    }
    if (residual) *residual = std::sqrt(rs) / bn;
    return it;
}

ScalarField step(const ScalarField& u, const FluxModel& F, double dt, const SolverSettings& s, StepWork* work,
                 StepStats* stats) {
    const Grid& g = u.grid;
    const double dtm = dt_max(g, F);
    if (!(dt > 0.0) || dt > dtm * (1.0 + 1e-12))
        throw Rejected("step: dt=" + std::to_string(dt) + " violates the stability bound dt_max=" + std::to_string(dtm));
    std::optional<StepWork> own;
    if (!work) {
        own.emplace(g);
        work = &*own;
    }
    StepWork& w = *work;
    kernels::parallel::gradient(g, u.v.data(), w.grad.x.data(), w.grad.y.data());
    kernels::parallel::for_each(g.nfaces(), [&](std::size_t f) { w.flux.set(f, F.flux(w.grad.at(f))); });
    kernels::parallel::divergence(g, w.flux.x.data(), w.flux.y.data(), w.rhs.data());
    kernels::parallel::for_each(g.ncells(), [&](std::size_t i) { w.rhs[i] = u.v[i] + dt * w.rhs[i]; });
    ScalarField out(g, u.t + dt);
    double res = 0.0;
    const int it = solve_shifted(g, dt * F.eps, w.rhs, out.v, w, s, &res);
    if (stats) {
        stats->cg_iterations = it;
        stats->cg_residual = res;
    }
    return out;
}

double energy(const ScalarField& u, const FluxModel& F) {
    const VectorField g = gradient(u);
    return u.grid.cell_volume() * kernels::parallel::sum(g.x.size(), [&](std::size_t f) { return F.energy_density(g.at(f)); });
}

MollifiedInitialData mollify_initial(const ScalarField& u0, double eps, double width_scale) {
    if (!all_finite(u0.v)) throw Rejected("mollify: initial data not finite");
    if (!(eps > 0.0)) throw Rejected("mollify: eps must be positive");
    const Grid& g = u0.grid;
    MollifiedInitialData m;
    m.eps = eps;
    m.width = width_scale * std::sqrt(eps);
    ScalarField cur = u0;
    for (int axis = 0; axis < g.dim; ++axis) {
        const double h = g.h(axis);
        const int K = m.width > 0.0 ? static_cast<int>(std::ceil(4.0 * m.width / h)) : 0;
        std::vector<double> w(2 * K + 1);
        double s = 0.0;
        for (int k = -K; k <= K; ++k) {
            const double x = k * h;
            w[k + K] = m.width > 0.0 ? std::exp(-x * x / (2.0 * m.width * m.width)) : 1.0;
            s += w[k + K];
        }
        for (double& v : w) v /= s;
        // odd reflection across the boundary so the smoothed data still vanishes there
        const int n = axis == 0 ? g.nx() : g.ny(), P = 2 * (n + 1);
        auto odd = [&](int i, int j) {
            int& k = axis == 0 ? i : j;
            const int t = ((k + 1) % P + P) % P;
            if (t == 0 || t == n + 1) return 0.0;
            if (t <= n) {
                k = t - 1;
                return cur.at(i, j);
            }
            k = P - t - 1;
            return -cur.at(i, j);
        };
        ScalarField next(g, u0.t);
        kernels::parallel::for_each(g.ncells(), [&](std::size_t c) {
            const int i = static_cast<int>(c % g.nx()), j = static_cast<int>(c / g.nx());
            double acc = 0.0;
            for (int k = -K; k <= K; ++k) acc += w[k + K] * (axis == 0 ? odd(i + k, j) : odd(i, j + k));
            next.v[c] = acc;
        });
        cur = std::move(next);
    }
    m.linf_source = norm_linf(u0);
    for (double& v : cur.v) v = std::clamp(v, -m.linf_source, m.linf_source);
    m.u0_eps = cur;
    m.bv = norm_bv(cur);
    m.l2_diff = dist_l2(cur, u0);
    m.linf = norm_linf(cur);
    m.sqrt_eps_h1 = std::sqrt(eps) * norm_h1(cur);
    return m;
}

namespace {

NormSample sample(const ScalarField& u, const FluxModel& F, double eps, double diss, double visc) {
    NormSample n;
    n.t = u.t;
    n.linf = norm_linf(u);
    n.w11 = norm_w11(u);
    n.l2 = norm_l2(u);
    n.ut_l2_cum = std::sqrt(diss);
    n.sqrt_eps_h1 = std::sqrt(eps) * norm_h1(u);
    n.energy = energy(u, F);
    n.visc_cum = visc;
    return n;
}

}  // namespace

Trajectory solve(const ScalarField& u0, double eps, const FluxModel& F, const TimeGrid& tg, const SolverSettings& s) {
    tg.validate();
    if (!all_finite(u0.v)) throw Rejected("solve: initial data not finite");
    const Grid& g = u0.grid;
    Trajectory tr;
    tr.potential = F.spec.id;
    tr.mode = F.mode;
    tr.eps = eps;
    tr.dt = tg.dt;
    tr.dt_max = dt_max(g, F);
    tr.substeps = std::max(1, static_cast<int>(std::ceil(tg.dt / tr.dt_max * (1.0 - 1e-12))));
    tr.dt_inner = tg.dt / tr.substeps;
    tr.linf0 = norm_linf(u0);
    tr.e0 = energy(u0, F);

    StepWork work(g);
    ScalarField u = u0;
    u.t = 0.0;
    double diss = 0.0, visc = 0.0, E = tr.e0;
    tr.checkpoints.push_back({u, ScalarField(g, 0.0)});
    tr.norms.push_back(sample(u, F, eps, 0.0, 0.0));
    const int steps = tg.steps();
    const double w = g.cell_volume();
    for (int n = 1; n <= steps; ++n) {
        ScalarField vel(g);
        for (int k = 0; k < tr.substeps; ++k) {
            StepStats st;
            ScalarField next = step(u, F, tr.dt_inner, s, &work, &st);
            tr.max_cg_iterations = std::max(tr.max_cg_iterations, st.cg_iterations);
            double d2 = 0.0;
            for (std::size_t i = 0; i < u.v.size(); ++i) {
                vel.v[i] = (next.v[i] - u.v[i]) / tr.dt_inner;
                d2 += vel.v[i] * vel.v[i];
            }
            diss += d2 * w * tr.dt_inner;
            visc += tr.dt_inner * eps * grad_l2sq(next);
            const double En = energy(next, F);
            tr.max_energy_increase = std::max(tr.max_energy_increase, En - E);
            E = En;
            tr.max_linf_excess = std::max(tr.max_linf_excess, norm_linf(next) - tr.linf0);
            u = std::move(next);
        }
        u.t = n * tg.dt;
        vel.t = u.t;
        if (n == 1) tr.checkpoints[0].ut = vel, tr.checkpoints[0].ut.t = 0.0;
        if (n % tg.stride == 0 || n == steps) {
            tr.checkpoints.push_back({u, vel});
            tr.norms.push_back(sample(u, F, eps, diss, visc));
        }
    }
    tr.dissipation = diss;
    return tr;
}

Trajectory solve(const MollifiedInitialData& data, const FluxModel& F, const TimeGrid& tg, const SolverSettings& s) {
    return solve(data.u0_eps, data.eps, F, tg, s);
}

double bounds_budget(const ScalarField& u0, const PotentialSpec& spec, double C_M) {
    return C_M * (1.0 + norm_bv(u0) + norm_linf(u0) + u0.grid.volume()) * spec.lambda_hi / spec.lambda_lo;
}

bool BoundsReport::passed() const {
    for (bool b : bounded)
        if (!b) return false;
    for (bool b : uniform)
        if (!b) return false;
    return sqrt_eps_h1_nonincreasing && visc_nonincreasing && visc_final_over_first <= 0.25;
}

BoundsReport verify_lemma25(const std::vector<Trajectory>& trajs, double budget, double tol_uniform) {
    if (trajs.size() < 3) throw Rejected("verify_lemma25: need at least 3 schedule members");
    BoundsReport r;
    r.budget = budget;
    for (const auto& t : trajs) {
        std::array<double, 6> s{};
        for (const auto& n : t.norms) {
            s[0] = std::max(s[0], n.linf);
            s[1] = std::max(s[1], n.w11);
            s[2] = std::max(s[2], n.l2);
            s[4] = std::max(s[4], n.sqrt_eps_h1);
        }
        s[3] = t.norms.back().ut_l2_cum;
        s[5] = t.norms.back().visc_cum;
        r.eps.push_back(t.eps);
        r.sups.push_back(s);
    }
    for (int k = 0; k < 5; ++k) {
        r.bounded[k] = true;
        for (const auto& s : r.sups) r.bounded[k] = r.bounded[k] && std::isfinite(s[k]) && s[k] <= budget;
    }
    for (int k = 0; k < 4; ++k) {
        r.uniform[k] = true;
        for (std::size_t m = 0; m + 1 < r.sups.size(); ++m) {
            const double a = r.sups[m][k], b = r.sups[m + 1][k];
            if (std::max(a, b) <= 1e-300) continue;
            const double q = b / a;
            if (!(q <= tol_uniform && q >= 1.0 / tol_uniform)) r.uniform[k] = false;
        }
    }
    r.sqrt_eps_h1_nonincreasing = r.visc_nonincreasing = true;
    for (std::size_t m = 0; m + 1 < r.sups.size(); ++m) {
        if (r.sups[m + 1][4] > r.sups[m][4] * (1.0 + 1e-12)) r.sqrt_eps_h1_nonincreasing = false;
        if (r.sups[m + 1][5] > r.sups[m][5] * (1.0 + 1e-12)) r.visc_nonincreasing = false;
    }
    auto ratio = [](double a, double b) { return a > 0.0 ? b / a : 0.0; };
    r.visc_final_over_first = ratio(r.sups.front()[5], r.sups.back()[5]);
    r.sqrt_eps_h1_final_over_first = ratio(r.sups.front()[4], r.sups.back()[4]);
    return r;
}

}  // namespace ymflow
