#include "ymflow/strong_flow.hpp"

#include <algorithm>
#include <cmath>

#include "ymflow/continuation.hpp"
#include "ymflow/kernels.hpp"
#include "ymflow/young_measure.hpp"

namespace ymflow {

namespace {

struct Stencil {
    int lo_i, lo_j, hi_i, hi_j;
};

// the two nodes of component `axis` of face (fi, fj); may be ghosts
Stencil stencil(const Grid& g, int fi, int fj, int axis) {
    if (g.dim == 1) return {fi - 1, 0, fi, 0};
    if (axis == 0) return {fi - 1, fj - 1, fi, fj - 1};
    return {fi - 1, fj - 1, fi - 1, fj};
}

bool inside(const Grid& g, int i, int j) { return i >= 0 && i < g.nx() && j >= 0 && j < g.ny(); }

}  // namespace

AnzellottiReport anzellotti_pair(const VectorField& z, const ScalarField& u, int levels) {
    const Grid& g = u.grid;
    if (!(z.grid == g)) throw Rejected("pairing: grid mismatch");
    if (!all_finite(u.v) || !all_finite(z.x) || !all_finite(z.y))
        throw Rejected("pairing: (z,u) is not in a supported pair class (non-finite values)");
    AnzellottiReport r;
    r.pair_class = "b";
    const double w = g.cell_volume();
    const ScalarField dz = divergence(z);
    r.pairing_density.assign(g.ncells(), 0.0);
    for (std::size_t k = 0; k < g.ncells(); ++k) r.pairing_density[k] = -u.v[k] * dz.v[k] * w;
    for (int fj = 0; fj < g.fy(); ++fj)
        for (int fi = 0; fi < g.fx(); ++fi) {
            const std::size_t f = g.face(fi, fj);
            r.z_inf = std::max(r.z_inf, norm(z.at(f)));
            for (int a = 0; a < g.dim; ++a) {
                const Stencil s = stencil(g, fi, fj, a);
                const double za = a == 0 ? z.x[f] : z.y[f];
                const double avg = 0.5 * (u.ghosted(s.lo_i, s.lo_j) + u.ghosted(s.hi_i, s.hi_j));
                const double c = za * avg / g.h(a) * w;
                if (inside(g, s.hi_i, s.hi_j)) r.pairing_density[g.cell(s.hi_i, s.hi_j)] -= c;
                if (inside(g, s.lo_i, s.lo_j)) r.pairing_density[g.cell(s.lo_i, s.lo_j)] += c;
            }
        }

    const auto sites = boundary_sites(g);
    const auto tr = boundary_trace(u, sites);
    double bdry = 0.0;
    for (std::size_t k = 0; k < sites.size(); ++k) {
        const Vec2 zf = z.at(sites[k].face);
        const double zn = zf[sites[k].axis] * sites[k].normal;
        r.normal_trace.push_back(zn);
        r.trace_excess = std::max(r.trace_excess, std::abs(zn) - r.z_inf);
        bdry += zn * tr[k] * sites[k].area;
    }
    double udz = 0.0, pd = 0.0;
    for (std::size_t k = 0; k < g.ncells(); ++k) {
        udz += u.v[k] * dz.v[k] * w;
        pd += r.pairing_density[k];
    }
    r.green_residual = std::abs(udz + pd - bdry);

    // dyadic boxes of nodes; (z,Du)(V) = Σ_f z·M(1_V)∇u h^N exactly
    const VectorField gu = gradient(u);
    const int ny = g.dim == 2 ? g.ny() : 1;
    for (int l = 0; l <= levels; ++l) {
        const int parts = 1 << l;
        if (parts > g.nx() || (g.dim == 2 && parts > g.ny())) break;
        const int py = g.dim == 2 ? parts : 1;
        for (int by = 0; by < py; ++by)
            for (int bx = 0; bx < parts; ++bx) {
                const int i0 = bx * g.nx() / parts, i1 = (bx + 1) * g.nx() / parts;
                const int j0 = by * ny / py, j1 = (by + 1) * ny / py;
                auto in = [&](int i, int j) { return inside(g, i, j) && i >= i0 && i < i1 && j >= j0 && j < j1 ? 1.0 : 0.0; };
                double mass = 0.0, zv = 0.0, du = 0.0;
                for (int j = j0; j < j1; ++j)
                    for (int i = i0; i < i1; ++i) mass += r.pairing_density[g.cell(i, j)];
                for (int fj = std::max(0, j0); fj <= std::min(g.fy() - 1, j1 + 1); ++fj)
                    for (int fi = std::max(0, i0); fi <= std::min(g.fx() - 1, i1 + 1); ++fi) {
                        const std::size_t f = g.face(fi, fj);
                        Vec2 m{0.0, 0.0};
                        bool touch = false;
                        for (int a = 0; a < g.dim; ++a) {
                            const Stencil s = stencil(g, fi, fj, a);
                            const double c = 0.5 * (in(s.lo_i, s.lo_j) + in(s.hi_i, s.hi_j));
                            m[a] = c * (a == 0 ? gu.x[f] : gu.y[f]);
                            touch = touch || c > 0.0;
                        }
                        if (!touch) continue;
                        zv = std::max(zv, norm(z.at(f)));
                        du += norm(m) * w;
                    }
                r.box_excess = std::max(r.box_excess, std::abs(mass) - zv * du);
                ++r.boxes;
            }
    }
    return r;
}

ProxSolver make_prox(const PotentialSpec& spec, double r_max) {
    if (!spec.radial) throw Rejected("strong solver: potential '" + spec.id + "' is not radial");
    ProxSolver P;
    P.hull = radial_hull(spec, 0.0, r_max);
    if (!P.hull.reliable) throw Rejected("strong solver: envelope of '" + spec.id + "' is not reliable on the box");
    P.rec = recession(spec, nullptr);
    P.lip = std::max(spec.flux_lip, 1e-12);
    return P;
}

namespace {

double d2env(const RadialHull& H, double t) { return H.piece(t) >= 0 ? 0.0 : std::max(0.0, H.base.d2h(t)); }

// t >= 0 with denv(t) + σ t = ρ
double radial_root(const RadialHull& H, double sigma, double rho) {
    if (rho <= 0.0) return 0.0;
    double lo = 0.0, hi = rho / sigma;
    double t = rho / (sigma + 1.0);
    for (int it = 0; it < 100; ++it) {
        const double f = H.denv(t) + sigma * t - rho;
        if (f == 0.0) return t;
        (f < 0.0 ? lo : hi) = t;
        if (hi - lo <= 1e-15 * hi) break;
        double tn = t - f / (d2env(H, t) + sigma);
        if (!(tn > lo && tn < hi)) tn = 0.5 * (lo + hi);
        t = tn;
    }
    return t;
}

}  // namespace

ScalarField prox_step(const ScalarField& u, double dt, const ProxSolver& P, VectorField& dual, ProxStats* stats) {
    if (!(dt > 0.0)) throw Rejected("prox step: dt must be positive");
    const Grid& g = u.grid;
    if (!(dual.grid == g)) dual = VectorField(g);
    const double un = std::sqrt(kernels::parallel::dot(u.v.size(), u.v.data(), u.v.data()));
    ProxStats st;
    if (un == 0.0) {
        dual = VectorField(g);
        if (stats) *stats = st;
        return u;
    }
    double L2 = 0.0;
    for (int a = 0; a < g.dim; ++a) L2 += 4.0 / (g.h(a) * g.h(a));
    const double L = std::sqrt(L2);
    const double mu = 1.0 / dt, delta = 1.0 / P.lip;
    const double mcp = 2.0 * std::sqrt(mu * delta) / L;
    const double tau = mcp / (2.0 * mu), sigma = mcp / (2.0 * delta), theta = 1.0 / (1.0 + mcp);

    ScalarField x = u, xbar = u, xold(g);
    VectorField Kx(g);
    ScalarField dv(g);
    const std::size_t nf = g.nfaces(), nc = g.ncells();
    for (st.iterations = 1; st.iterations <= P.cap; ++st.iterations) {
        kernels::parallel::gradient(g, xbar.v.data(), Kx.x.data(), Kx.y.data());
        kernels::parallel::for_each(nf, [&](std::size_t f) {
            const Vec2 wv{dual.x[f] + sigma * Kx.x[f], dual.y[f] + sigma * Kx.y[f]};
            const double rho = norm(wv);
            if (rho == 0.0) {
                dual.set(f, {0.0, 0.0});
                return;
            }
            const double t = radial_root(P.hull, sigma, rho);
            dual.set(f, (P.hull.denv(t) / rho) * wv);
        });
        kernels::parallel::divergence(g, dual.x.data(), dual.y.data(), dv.v.data());
        xold.v = x.v;
        const double a = tau / dt;
        kernels::parallel::for_each(nc, [&](std::size_t k) {
            x.v[k] = (x.v[k] + tau * dv.v[k] + a * u.v[k]) / (1.0 + a);
            xbar.v[k] = x.v[k] + theta * (x.v[k] - xold.v[k]);
        });
        const double dn = std::sqrt(kernels::parallel::sum(nc, [&](std::size_t k) {
            const double d = x.v[k] - xold.v[k];
            return d * d;
        }));
        st.residual = dn / un;
        if (st.residual <= P.tol) break;
    }
    if (st.iterations > P.cap)
        throw SolverFailure("prox step: iteration cap reached, residual " + fmt17(st.residual));
    if (stats) *stats = st;
    x.t = u.t + dt;
    return x;
}

double envelope_energy(const ScalarField& u, const ProxSolver& P) {
    const VectorField gu = gradient(u);
    return u.grid.cell_volume() * kernels::parallel::sum(gu.x.size(), [&](std::size_t f) { return P.hull.env(gu.at(f)); });
}

StrongSolutionCertificate certify(const StrongCheckpoint& c, const PotentialSpec& spec, const ProxSolver& P) {
    const Grid& g = c.u.grid;
    StrongSolutionCertificate cert;
    cert.t = c.u.t;
    const double w = g.cell_volume();
    const VectorField gu = gradient(c.u);
    const BVSplit split = bv_split(c.u, default_jump_threshold(c.u));
    VectorField z(g);
    for (std::size_t f = 0; f < gu.x.size(); ++f) z.set(f, split.singular[f] ? c.z.at(f) : spec.grad(gu.at(f)));
    const ScalarField dz = divergence(z);
    double s51 = 0.0;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            bool smooth;
            if (g.dim == 1)
                smooth = !split.singular[g.face(i)] && !split.singular[g.face(i + 1)];
            else
                smooth = !split.singular[g.face(i, j + 1)] && !split.singular[g.face(i + 1, j + 1)] &&
                         !split.singular[g.face(i + 1, j)];
            if (!smooth) continue;
            const std::size_t k = g.cell(i, j);
            const double d = c.ut.v[k] - dz.v[k];
            s51 += d * d * w;
        }
    cert.d51_residual = std::sqrt(s51);
    for (std::size_t f = 0; f < gu.x.size(); ++f) {
        if (!split.singular[f]) continue;
        const Vec2& th = split.direction[f];
        const double mass = norm(gu.at(f)) * w;
        cert.d52_residual += std::abs(dot(c.z.at(f), th) - P.rec.phi_inf_at(th)) * mass;
        cert.singular_mass += mass;
        ++cert.singular_faces;
    }
    const auto sites = boundary_sites(g);
    const auto tr = boundary_trace(c.u, sites);
    for (std::size_t k = 0; k < sites.size(); ++k) {
        Vec2 n{0.0, 0.0};
        n[sites[k].axis] = sites[k].normal;
        const double zn = dot(z.at(sites[k].face), n);
        const double pinf = P.rec.phi_inf_at(n);
        double r;
        if (std::abs(tr[k]) <= split.threshold)
            r = std::max(0.0, std::abs(zn) - pinf);
        else
            r = std::abs(zn + (tr[k] > 0.0 ? 1.0 : -1.0) * pinf);
        cert.d53_residual = std::max(cert.d53_residual, r);
    }
    return cert;
}

StrongTrajectory solve_strong(const ScalarField& u0, const PotentialSpec& spec, const TimeGrid& tg, const ProxSolver& P) {
    tg.validate();
    u0.grid.validate();
    if (u0.grid.dim != spec.dim) throw Rejected("strong solver: potential dimension does not match the grid");
    if (!all_finite(u0.v)) throw Rejected("strong solver: initial data not finite");
    StrongTrajectory tr;
    tr.potential = spec.id;
    tr.dt = tg.dt;
    const Grid& g = u0.grid;
    VectorField dual(g);
    ScalarField u = u0;
    u.t = 0.0;
    tr.energy.push_back(envelope_energy(u, P));
    const int steps = tg.steps();
    for (int k = 1; k <= steps; ++k) {
        ProxStats st;
        ScalarField next = prox_step(u, tg.dt, P, dual, &st);
        next.t = k * tg.dt;
        tr.max_iterations = std::max(tr.max_iterations, st.iterations);
        tr.energy.push_back(envelope_energy(next, P));
        tr.max_energy_increase = std::max(tr.max_energy_increase, tr.energy[k] - tr.energy[k - 1]);
        ScalarField ut(g, next.t);
        for (std::size_t c = 0; c < ut.v.size(); ++c) ut.v[c] = (next.v[c] - u.v[c]) / tg.dt;
        if (k == 1) {
            ut.t = 0.0;
            tr.checkpoints.push_back({u, ut, dual});
        }
        if (k % tg.stride == 0) tr.checkpoints.push_back({next, ut, dual});
        u = std::move(next);
    }
    for (const auto& c : tr.checkpoints) {
        tr.times.push_back(c.u.t);
        tr.certificates.push_back(certify(c, spec, P));
    }
    return tr;
}

EquivalenceReport compare_equivalence(const LimitBundle& b, const std::vector<GeneralizedYoungMeasure>& measures,
                                      const StrongTrajectory& strong, const PotentialSpec& spec, const ProxSolver& P) {
    if (b.members.empty()) throw Rejected("equivalence: empty bundle");
    if (!P.hull.intervals.empty())
        throw Rejected("equivalence: potential '" + spec.id + "' is not convex; the strong formulation needs Φ = Φ**");
    if (b.mode == FluxMode::Relaxed) throw Rejected("equivalence: bundle must use the raw or envelope flux");
    if (!(strong.checkpoints.front().u.grid == b.grid)) throw Rejected("equivalence: grids differ");
    if (strong.times.size() != b.times.size() || measures.size() != b.times.size())
        throw Rejected("equivalence: checkpoint counts differ");
    for (std::size_t c = 0; c < b.times.size(); ++c)
        if (std::abs(strong.times[c] - b.times[c]) > 1e-9 * (1.0 + b.times[c]))
            throw Rejected("equivalence: checkpoint times differ");
    EquivalenceReport r;
    r.times = b.times;
    const Grid& g = b.grid;
    const double w = g.cell_volume();
    for (std::size_t c = 0; c < b.times.size(); ++c) {
        const ScalarField& us = strong.checkpoints[c].u;
        r.l2_distance.push_back(dist_l2(b.u_limit[c], us));
        const VectorField gs = gradient(us);
        const BVSplit ss = bv_split(us, default_jump_threshold(us));
        const VectorField nq = flux_field(measures[c], spec);
        double fl = 0.0;
        for (std::size_t f = 0; f < gs.x.size(); ++f) {
            if (ss.singular[f]) continue;
            const Vec2 d = nq.at(f) - spec.grad(gs.at(f));
            fl += dot(d, d) * w;
        }
        r.flux_agreement.push_back(std::sqrt(fl));
        const VectorField gy = gradient(b.u_limit[c]);
        const BVSplit sy = bv_split(b.u_limit[c], default_jump_threshold(b.u_limit[c]));
        double si = 0.0;
        for (std::size_t f = 0; f < gy.x.size(); ++f) {
            if (!sy.singular[f]) continue;
            const Vec2& th = sy.direction[f];
            si += std::abs(dot(nq.at(f), th) - P.rec.phi_inf_at(th)) * norm(gy.at(f)) * w;
        }
        r.singular_identity.push_back(si);
        r.max_l2 = std::max(r.max_l2, r.l2_distance.back());
        r.max_flux = std::max(r.max_flux, r.flux_agreement.back());
        r.max_singular = std::max(r.max_singular, si);
    }
    return r;
}

}  // namespace ymflow
