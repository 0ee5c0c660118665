#include "ymflow/young_measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ymflow/continuation.hpp"
#include "ymflow/kernels.hpp"

namespace ymflow {

int BinSpec::bin_of(const Vec2& A) const {
    auto idx = [&](double x) {
        const int i = static_cast<int>(std::floor((x + r_hist) / width()));
        return std::clamp(i, 0, per_axis - 1);
    };
    if (dim == 1) return idx(A[0]);
    return idx(A[0]) + per_axis * idx(A[1]);
}

Vec2 BinSpec::center(int b) const {
    auto c = [&](int i) { return -r_hist + (i + 0.5) * width(); };
    if (dim == 1) return {c(b), 0.0};
    return {c(b % per_axis), c(b / per_axis)};
}

int BinSpec::sphere_bin_of(const Vec2& d) const {
    if (dim == 1) return d[0] >= 0.0 ? 0 : 1;
    double a = std::atan2(d[1], d[0]);
    if (a < 0.0) a += 2.0 * M_PI;
    return std::min(static_cast<int>(a / (2.0 * M_PI) * sphere_bins), sphere_bins - 1);
}

Vec2 BinSpec::sphere_center(int b) const {
    if (dim == 1) return {b == 0 ? 1.0 : -1.0, 0.0};
    const double a = 2.0 * M_PI * (b + 0.5) / sphere_bins;
    return {std::cos(a), std::sin(a)};
}

void hist_add(Histogram& h, int bin, double mass, const Vec2& loc) {
    if (mass <= 0.0) return;
    for (auto& e : h)
        if (e.bin == bin) {
            const double m = e.mass + mass;
            e.atom = (1.0 / m) * (e.mass * e.atom + mass * loc);
            e.mass = m;
            return;
        }
    h.push_back({bin, mass, loc});
}

double hist_total(const Histogram& h) {
    double s = 0.0;
    for (const auto& e : h) s += e.mass;
    return s;
}

void hist_normalize(Histogram& h) {
    const double s = hist_total(h);
    if (s <= 0.0) return;
    for (auto& e : h) e.mass /= s;
    std::sort(h.begin(), h.end(), [](const BinMass& a, const BinMass& b) { return a.bin < b.bin; });
}

namespace {
void unit_atoms(Histogram& h) {
    for (auto& e : h) {
        const double r = norm(e.atom);
        if (r > 0.0) e.atom = (1.0 / r) * e.atom;
    }
}
}  // namespace

void GeneralizedYoungMeasure::validate() const {
    auto unit = [](const Histogram& h) { return std::abs(hist_total(h) - 1.0) <= 1e-12; };
    for (std::size_t f = 0; f < nu.size(); ++f) {
        if (!unit(nu[f])) throw Rejected("measure: oscillation histogram not normalised at site " + std::to_string(f));
        if (!(lambda[f] >= 0.0) || !std::isfinite(lambda[f])) throw Rejected("measure: negative or non-finite concentration");
        if (lambda[f] > 0.0 && !unit(nu_inf[f])) throw Rejected("measure: direction histogram not normalised");
    }
    for (std::size_t k = 0; k < lambda_b.size(); ++k) {
        if (!(lambda_b[k] >= 0.0) || !std::isfinite(lambda_b[k])) throw Rejected("measure: bad boundary concentration");
        if (lambda_b[k] > 0.0 && !unit(nu_inf_b[k])) throw Rejected("measure: boundary direction histogram not normalised");
    }
}

double GeneralizedYoungMeasure::lambda_interior() const {
    double s = 0.0;
    for (double l : lambda) s += l;
    return s;
}

double GeneralizedYoungMeasure::lambda_boundary() const {
    double s = 0.0;
    for (double l : lambda_b) s += l;
    return s;
}

void attach_boundary(GeneralizedYoungMeasure& m, const ScalarField& u) {
    m.bsites = boundary_sites(u.grid);
    m.trace = boundary_trace(u, m.bsites);
    m.lambda_b.assign(m.bsites.size(), 0.0);
    m.nu_inf_b.assign(m.bsites.size(), {});
    for (std::size_t k = 0; k < m.bsites.size(); ++k) {
        const double tr = m.trace[k];
        if (tr == 0.0) continue;
        const auto& s = m.bsites[k];
        m.lambda_b[k] = std::abs(tr) * s.area;
        Vec2 d{0.0, 0.0};
        d[s.axis] = -(tr > 0.0 ? 1.0 : -1.0) * s.normal;
        hist_add(m.nu_inf_b[k], m.bins.sphere_bin_of(d), 1.0, d);
    }
}

namespace {
GeneralizedYoungMeasure blank(const Grid& g, const BinSpec& bins) {
    GeneralizedYoungMeasure m;
    m.grid = g;
    m.bins = bins;
    m.bins.dim = g.dim;
    m.nu.assign(g.nfaces(), {});
    m.lambda.assign(g.nfaces(), 0.0);
    m.nu_inf.assign(g.nfaces(), {});
    return m;
}
}  // namespace

GeneralizedYoungMeasure elementary(const ScalarField& u, const BVSplit& split, const BinSpec& bins) {
    GeneralizedYoungMeasure m = blank(u.grid, bins);
    const VectorField g = gradient(u);
    const double w = u.grid.cell_volume();
    for (std::size_t f = 0; f < g.x.size(); ++f) {
        const Vec2 A = g.at(f);
        if (split.singular[f]) {
            hist_add(m.nu[f], m.bins.bin_of({0.0, 0.0}), 1.0, {0.0, 0.0});
            m.lambda[f] = norm(A) * w;
            hist_add(m.nu_inf[f], m.bins.sphere_bin_of(split.direction[f]), 1.0, split.direction[f]);
        } else {
            hist_add(m.nu[f], m.bins.bin_of(A), 1.0, A);
        }
    }
    m.r_cut = split.threshold / u.grid.hmin();
    attach_boundary(m, u);
    return m;
}

GeneralizedYoungMeasure epsilon_level(const ScalarField& u, const FluxModel& F, const BinSpec& bins) {
    GeneralizedYoungMeasure m = blank(u.grid, bins);
    const VectorField g = gradient(u);
    for (std::size_t f = 0; f < g.x.size(); ++f) {
        Atom at[2];
        const int na = F.atoms(g.at(f), at);
        for (int k = 0; k < na; ++k) hist_add(m.nu[f], m.bins.bin_of(at[k].loc), at[k].w, at[k].loc);
        hist_normalize(m.nu[f]);
    }
    m.r_cut = m.bins.r_hist;
    attach_boundary(m, u);
    return m;
}

GeneralizedYoungMeasure estimate(const LimitBundle& b, std::size_t c, const BinSpec& bins, const EstimateSettings& s) {
    if (s.window < 1 || s.window % 2 == 0) throw Rejected("estimate: window must be a positive odd number of cells");
    const std::size_t K = std::min<std::size_t>(static_cast<std::size_t>(s.members), b.gradient_stack.size());
    if (K < 2) throw Rejected("estimate: need at least two gradient stacks");
    if (c >= b.times.size()) throw Rejected("estimate: checkpoint out of range");
    const Grid& g = b.grid;
    GeneralizedYoungMeasure m = blank(g, bins);
    const std::size_t first = b.gradient_stack.size() - K;
    const double w = g.cell_volume();

    std::vector<double> mags;
    for (std::size_t k = first; k < b.gradient_stack.size(); ++k) {
        const VectorField& G = b.gradient_stack[k][c];
        for (std::size_t f = 0; f < G.x.size(); ++f) mags.push_back(std::hypot(G.x[f], G.y[f]));
    }
    const std::size_t qi = std::min(mags.size() - 1, static_cast<std::size_t>(s.cutoff_quantile * (mags.size() - 1)));
    std::nth_element(mags.begin(), mags.begin() + static_cast<long>(qi), mags.end());
    const double Q = mags[qi];
    const double thr = default_jump_threshold(b.u_limit[c]) / g.hmin();
    m.r_cut = std::min(std::max(Q, thr), bins.r_hist);

    const int rad = (s.window - 1) / 2;
    kernels::parallel::for_each(g.nfaces(), [&](std::size_t f) {
        const int fi = static_cast<int>(f % g.fx()), fj = static_cast<int>(f / g.fx());
        std::vector<std::size_t> pool;
        for (int dj = -rad; dj <= rad; ++dj)
            for (int di = -rad; di <= rad; ++di) {
                const int i = fi + di, j = fj + dj;
                if (i < 0 || i >= g.fx() || j < 0 || j >= g.fy()) continue;
                if (g.dim == 1 && dj != 0) continue;
                pool.push_back(g.face(i, j));
            }
        const double wn = 1.0 / static_cast<double>(pool.size() * K);
        Histogram nu, inf;
        double lam = 0.0;
        for (std::size_t k = first; k < b.gradient_stack.size(); ++k) {
            const VectorField& G = b.gradient_stack[k][c];
            const FluxModel& F = b.flux[b.stack[k]];
            for (std::size_t p : pool) {
                Atom at[2];
                const int na = F.atoms(G.at(p), at);
                for (int a = 0; a < na; ++a) {
                    const double r = norm(at[a].loc);
                    if (r <= m.r_cut) {
                        hist_add(nu, m.bins.bin_of(at[a].loc), wn * at[a].w, at[a].loc);
                    } else {
                        lam += wn * at[a].w * r * w;
                        const Vec2 d = (1.0 / r) * at[a].loc;
                        hist_add(inf, m.bins.sphere_bin_of(d), wn * at[a].w * r, d);
                    }
                }
            }
        }
        if (nu.empty()) hist_add(nu, m.bins.bin_of({0.0, 0.0}), 1.0, {0.0, 0.0});
        hist_normalize(nu);
        hist_normalize(inf);
        unit_atoms(inf);
        m.nu[f] = std::move(nu);
        m.lambda[f] = lam;
        m.nu_inf[f] = std::move(inf);
    });
    attach_boundary(m, b.u_limit[c]);
    return m;
}

Vec2 mean_I(const Histogram& h) {
    Vec2 s{0.0, 0.0};
    for (const auto& e : h) s = s + e.mass * e.atom;
    return s;
}

Vec2 mean_q(const Histogram& h, const PotentialSpec& spec) {
    Vec2 s{0.0, 0.0};
    for (const auto& e : h) s = s + e.mass * spec.grad(e.atom);
    return s;
}

double mean_qI(const Histogram& h, const PotentialSpec& spec) {
    double s = 0.0;
    for (const auto& e : h) s += e.mass * dot(spec.grad(e.atom), e.atom);
    return s;
}

VectorField flux_field(const GeneralizedYoungMeasure& m, const PotentialSpec& spec) {
    VectorField z(m.grid);
    for (std::size_t f = 0; f < m.nu.size(); ++f) z.set(f, mean_q(m.nu[f], spec));
    return z;
}

double pair(const GeneralizedYoungMeasure& m, const Integrand& g) {
    const double w = m.grid.cell_volume();
    double s = 0.0;
    for (std::size_t f = 0; f < m.nu.size(); ++f) {
        double a = 0.0;
        for (const auto& e : m.nu[f]) a += e.mass * g.f(e.atom);
        s += a * w;
    }
    auto conc = [&](const Histogram& h, double lam) {
        if (lam == 0.0) return 0.0;
        if (!g.f_inf) throw Rejected("pair: integrand '" + g.name + "' has no recession function");
        double a = 0.0;
        for (const auto& e : h) a += e.mass * g.f_inf(e.atom);
        return a * lam;
    };
    for (std::size_t f = 0; f < m.nu.size(); ++f) s += conc(m.nu_inf[f], m.lambda[f]);
    for (std::size_t k = 0; k < m.lambda_b.size(); ++k) s += conc(m.nu_inf_b[k], m.lambda_b[k]);
    return s;
}

CoincidenceOracle CoincidenceOracle::radial(const RadialHull& hull) {
    CoincidenceOracle o;
    o.distance = [hull](const Vec2& A) { return hull.gap(norm(A)); };
    return o;
}

CoincidenceOracle CoincidenceOracle::sampled(const ConvexEnvelope& env) {
    std::vector<Vec2> pts;
    for (std::size_t k = 0; k < env.size(); ++k)
        if (env.coincidence[k]) pts.push_back(env.point(k));
    CoincidenceOracle o;
    o.distance = [pts](const Vec2& A) {
        double d = std::numeric_limits<double>::infinity();
        for (const Vec2& p : pts) d = std::min(d, norm(A - p));
        return d;
    };
    return o;
}

double check_support(const GeneralizedYoungMeasure& m, const CoincidenceOracle& oracle) {
    const double w = m.grid.cell_volume(), rad = m.bins.radius();
    double v = 0.0;
    for (const auto& h : m.nu)
        for (const auto& e : h)
            if (oracle.distance(e.atom) > rad * (1.0 + 1e-12)) v += e.mass * w;
    return v;
}

void check_independence(const GeneralizedYoungMeasure& m, const PotentialSpec& spec, double& l1, double& mx) {
    const double w = m.grid.cell_volume();
    l1 = mx = 0.0;
    for (const auto& h : m.nu) {
        const double r = std::abs(mean_qI(h, spec) - dot(mean_q(h, spec), mean_I(h)));
        l1 += r * w;
        mx = std::max(mx, r);
    }
}

JFResult check_jf(const GeneralizedYoungMeasure& m, const PotentialSpec& spec, const RecessionTable& rec) {
    const double w = m.grid.cell_volume(), Lam = spec.lambda_hi;
    JFResult r;
    r.min_abs = r.min_rel = std::numeric_limits<double>::infinity();
    auto take = [&](double d, double scale) {
        r.min_abs = std::min(r.min_abs, d);
        r.gap_abs = std::max(r.gap_abs, std::abs(d));
        if (scale > 0.0) {
            r.min_rel = std::min(r.min_rel, d / scale);
            r.gap_rel = std::max(r.gap_rel, std::abs(d) / scale);
        }
    };
    auto inf_moments = [&](const Histogram& h, Vec2& I, double& qI) {
        I = {0.0, 0.0};
        qI = 0.0;
        for (const auto& e : h) {
            I = I + e.mass * e.atom;
            qI += e.mass * rec.qI_inf_at(e.atom);
        }
    };
    for (std::size_t f = 0; f < m.nu.size(); ++f) {
        const Histogram& h = m.nu[f];
        const Vec2 q = mean_q(h, spec), I = mean_I(h);
        double lhs = dot(q, I) * w, rhs = mean_qI(h, spec) * w;
        double scale = 0.0;
        for (const auto& e : h) scale += e.mass * (Lam * norm(e.atom) + 1.0);
        scale *= w;
        if (m.lambda[f] > 0.0) {
            Vec2 iI;
            double iqI;
            inf_moments(m.nu_inf[f], iI, iqI);
            lhs += dot(q, iI) * m.lambda[f];
            rhs += iqI * m.lambda[f];
            scale += Lam * m.lambda[f];
        }
        take(lhs - rhs, scale);
    }
    for (std::size_t k = 0; k < m.lambda_b.size(); ++k) {
        if (m.lambda_b[k] == 0.0) continue;
        const Vec2 q = mean_q(m.nu[m.bsites[k].face], spec);
        Vec2 iI;
        double iqI;
        inf_moments(m.nu_inf_b[k], iI, iqI);
        double scale = Lam * m.lambda_b[k];
        for (const auto& e : m.nu[m.bsites[k].face]) scale += e.mass * (Lam * norm(e.atom) + 1.0) * w;
        take((dot(q, iI) - iqI) * m.lambda_b[k], scale);
    }
    if (!std::isfinite(r.min_abs)) r.min_abs = 0.0;
    if (!std::isfinite(r.min_rel)) r.min_rel = 0.0;
    return r;
}

void check_barycenter(const GeneralizedYoungMeasure& m, const ScalarField& u, double& interior, double& boundary) {
    if (!(m.grid == u.grid)) throw Rejected("barycenter: grid mismatch");
    const VectorField g = gradient(u);
    const double w = m.grid.cell_volume();
    interior = boundary = 0.0;
    for (std::size_t f = 0; f < m.nu.size(); ++f) {
        Vec2 rep = w * mean_I(m.nu[f]);
        if (m.lambda[f] > 0.0) rep = rep + m.lambda[f] * mean_I(m.nu_inf[f]);
        interior += norm(w * g.at(f) - rep);
    }
    const auto sites = boundary_sites(u.grid);
    const auto tr = boundary_trace(u, sites);
    for (std::size_t k = 0; k < sites.size(); ++k) {
        Vec2 target{0.0, 0.0};
        target[sites[k].axis] = -tr[k] * sites[k].normal * sites[k].area;
        Vec2 rep{0.0, 0.0};
        if (k < m.lambda_b.size() && m.lambda_b[k] > 0.0) rep = m.lambda_b[k] * mean_I(m.nu_inf_b[k]);
        boundary += norm(rep - target);
    }
}

std::vector<Integrand> jensen_dictionary(const PotentialSpec& spec, const RadialHull* hull, const RecessionTable& rec) {
    std::vector<Integrand> d;
    d.push_back({"abs", [](const Vec2& A) { return norm(A); }, [](const Vec2& v) { return norm(v); }});
    if (hull) {
        const RadialHull H = *hull;
        d.push_back({"envelope", [H](const Vec2& A) { return H.env(A); },
                     [rec](const Vec2& v) {
                         const double r = norm(v);
                         return r == 0.0 ? 0.0 : r * rec.phi_inf_at((1.0 / r) * v);
                     }});
    }
    for (int a = 0; a < spec.dim; ++a)
        for (double sg : {1.0, -1.0}) {
            Vec2 e{0.0, 0.0};
            e[a] = sg;
            d.push_back({"hinge" + std::to_string(a) + (sg > 0 ? "+" : "-"),
                         [e](const Vec2& A) { return std::max(0.0, dot(A, e) - 1.0); },
                         [e](const Vec2& v) { return std::max(0.0, dot(v, e)); }});
        }
    return d;
}

double check_jensen(const GeneralizedYoungMeasure& m, const std::vector<Integrand>& dict, std::string* worst_entry) {
    const double w = m.grid.cell_volume();
    double worst = 0.0;
    for (const auto& g : dict) {
        for (std::size_t f = 0; f < m.nu.size(); ++f) {
            const Histogram& h = m.nu[f];
            double gap;
            const double rho = m.lambda[f] / w;
            if (rho <= m.r_cut) {
                double a = 0.0;
                for (const auto& e : h) a += e.mass * g.f(e.atom);
                Vec2 bar = mean_I(h);
                if (rho > 0.0) {
                    double c = 0.0;
                    for (const auto& e : m.nu_inf[f]) c += e.mass * g.f_inf(e.atom);
                    a += c * rho;
                    bar = bar + rho * mean_I(m.nu_inf[f]);
                }
                gap = a - g.f(bar);
            } else {
                double c = 0.0;
                for (const auto& e : m.nu_inf[f]) c += e.mass * g.f_inf(e.atom);
                gap = c - g.f_inf(mean_I(m.nu_inf[f]));
            }
            if (gap < worst) {
                worst = gap;
                if (worst_entry) *worst_entry = g.name;
            }
        }
    }
    return worst;
}

StructuralReport structural_report(const GeneralizedYoungMeasure& m, const ScalarField& u, const PotentialSpec& spec,
                                   const RecessionTable& rec, const CoincidenceOracle& oracle, const RadialHull* hull) {
    StructuralReport r;
    r.support_violation_mass = check_support(m, oracle);
    check_independence(m, spec, r.independence_l1, r.independence_max);
    const JFResult jf = check_jf(m, spec, rec);
    r.jf_residual_min = jf.min_abs;
    r.jf_equality_gap = jf.gap_abs;
    r.jf_residual_min_rel = jf.min_rel;
    r.jf_equality_gap_rel = jf.gap_rel;
    check_barycenter(m, u, r.barycenter_interior, r.barycenter_boundary);
    r.jensen_worst = check_jensen(m, jensen_dictionary(spec, hull, rec), &r.jensen_worst_entry);
    return r;
}

TransformSamples compactified_transform(const Integrand& g, int dim, int n_radius, int n_dirs) {
    if (!g.f_inf) throw Rejected("compactified transform: integrand needs a recession function");
    TransformSamples t;
    const auto dirs = sphere_directions(dim, n_dirs);
    for (int i = 0; i < n_radius; ++i) t.radius.push_back(static_cast<double>(i) / (n_radius - 1));
    for (const Vec2& eta : dirs) {
        std::vector<double> v(n_radius);
        for (int i = 0; i < n_radius; ++i) {
            const double r = t.radius[i];
            v[i] = i + 1 < n_radius ? (1.0 - r) * g.f((r / (1.0 - r)) * eta) : g.f_inf(eta);
        }
        double jmax = 0.0;
        for (int i = 0; i + 2 < n_radius; ++i) jmax = std::max(jmax, std::abs(v[i + 1] - v[i]));
        t.interior_jump = std::max(t.interior_jump, jmax);
        t.boundary_jump = std::max(t.boundary_jump, std::abs(v[n_radius - 1] - v[n_radius - 2]));
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        const double mean = (*hi - *lo) / (n_radius - 1);
        if (mean > 0.0) t.steepness = std::max(t.steepness, std::max(jmax, t.boundary_jump) / mean);
        t.values.push_back(std::move(v));
    }
    t.score = t.interior_jump > 0.0 ? t.boundary_jump / t.interior_jump : (t.boundary_jump > 0.0 ? 1e300 : 0.0);
    t.accepted = t.score <= 10.0 && t.steepness <= 10.0;
    return t;
}

UniquenessProbe uniqueness_integrand(const GeneralizedYoungMeasure& a, const GeneralizedYoungMeasure& b,
                                     const PotentialSpec& spec, const CoincidenceOracle& oracle) {
    if (!(a.grid == b.grid)) throw Rejected("uniqueness integrand: grid mismatch");
    UniquenessProbe p;
    p.sites = a.nu.size();
    p.min_value = std::numeric_limits<double>::infinity();
    auto coincident = [&](const Histogram& h) {
        for (const auto& e : h)
            if (oracle.distance(e.atom) > 0.0) return false;
        return true;
    };
    for (std::size_t f = 0; f < a.nu.size(); ++f) {
        if (!coincident(a.nu[f]) || !coincident(b.nu[f])) continue;
        const double I = mean_qI(a.nu[f], spec) + mean_qI(b.nu[f], spec) - dot(mean_q(b.nu[f], spec), mean_I(a.nu[f])) -
                         dot(mean_q(a.nu[f], spec), mean_I(b.nu[f]));
        p.min_value = std::min(p.min_value, I);
        p.values.emplace_back(f, I);
        ++p.checked;
    }
    if (p.checked == 0) p.min_value = 0.0;
    return p;
}

}  // namespace ymflow
