#include "ymflow/potential.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <limits>
#include <random>
#include <sstream>

namespace ymflow {

namespace {

double hq_step(double a) { return 1e-5 * (1.0 + std::abs(a)); }

PotentialSpec radial_spec(std::string id, std::function<double(double)> h, std::function<double(double)> dh,
                          double lo, double hi, double lip) {
    PotentialSpec s;
    s.id = std::move(id);
    s.radial = true;
    s.profile = std::move(h);
    s.dprofile = std::move(dh);
    s.lambda_lo = lo;
    s.lambda_hi = hi;
    s.flux_lip = lip;
    return s;
}

}  // namespace

double PotentialSpec::dh(double r) const {
    if (dprofile) return dprofile(r);
    const double e = hq_step(r);
    return (profile(r + e) - profile(std::abs(r - e))) / (2.0 * e);
}

double PotentialSpec::d2h(double r) const {
    const double e = 1e-4 * (1.0 + std::abs(r));
    return (dh(r + e) - dh(r - e)) / (2.0 * e);
}

double PotentialSpec::eval(const Vec2& A) const {
    if (radial) return profile(dim == 1 ? std::abs(A[0]) : norm(A));
    return value(A);
}

Vec2 PotentialSpec::grad(const Vec2& A) const {
    if (radial) {
        const double r = dim == 1 ? std::abs(A[0]) : norm(A);
        if (r == 0.0) return {0.0, 0.0};
        const double g = dh(r) / r;
        return {g * A[0], dim == 1 ? 0.0 : g * A[1]};
    }
    if (gradf) return gradf(A);
    Vec2 q{0.0, 0.0};
    for (int a = 0; a < dim; ++a) {
        Vec2 p = A, m = A;
        const double e = hq_step(norm(A));
        p[a] += e;
        m[a] -= e;
        q[a] = (value(p) - value(m)) / (2.0 * e);
    }
    return q;
}

PotentialSpec PotentialSpec::shifted(double eps) const {
    PotentialSpec s = *this;
    std::ostringstream id_s;
    id_s << id << "+eps" << eps;
    s.id = id_s.str();
    s.test_only = true;
    s.flux_lip = flux_lip + eps;
    if (radial) {
        auto h0 = profile;
        s.profile = [h0, eps](double r) { return h0(r) + 0.5 * eps * r * r; };
        const PotentialSpec self = *this;
        s.dprofile = [self, eps](double r) { return self.dh(r) + eps * r; };
    } else {
        const PotentialSpec self = *this;
        s.value = [self, eps](const Vec2& A) { return self.value(A) + 0.5 * eps * dot(A, A); };
        s.gradf = [self, eps](const Vec2& A) { return self.grad(A) + eps * A; };
    }
    return s;
}

std::vector<std::string> catalog_names(bool include_test_only) {
    std::vector<std::string> v = {"minimal-surface", "log-cosh", "gauss-dip"};
    if (include_test_only) {
        for (const char* t : {"double-well-test", "quadratic-test", "zero-flux-test", "linear-test", "gauss-dip-narrow-test"})
            v.emplace_back(t);
    }
    return v;
}

PotentialSpec make_potential(const std::string& id, int dim, const std::map<std::string, double>& params) {
    if (dim != 1 && dim != 2) throw Rejected("potential: dim must be 1 or 2");
    auto param = [&](const char* k, double d) {
        auto it = params.find(k);
        return it == params.end() ? d : it->second;
    };
    PotentialSpec s;
    if (id == "minimal-surface") {
        s = radial_spec(id, [](double r) { return std::sqrt(1.0 + r * r); },
                        [](double r) { return r / std::sqrt(1.0 + r * r); }, 1.0, 1.0, 1.0);
    } else if (id == "log-cosh") {
        s = radial_spec(id, [](double r) { r = std::abs(r); return r + std::log1p(std::exp(-2.0 * r)) - std::log(2.0); },
                        [](double r) { return std::tanh(r); }, 1.0, 1.0, 1.0);
    } else if (id == "gauss-dip" || id == "gauss-dip-narrow-test") {
        const double c = param("c", 0.5);
        if (!(c > 0.0 && c < 1.0)) throw Rejected("gauss-dip: need 0 < c < 1");
        s = radial_spec(id, [c](double r) { return std::sqrt(1.0 + r * r) - c * std::exp(-r * r); },
                        [c](double r) { return r / std::sqrt(1.0 + r * r) + 2.0 * c * r * std::exp(-r * r); }, 1.0,
                        id == "gauss-dip" ? 1.5 : 0.9, 1.0 + 2.0 * c);
        s.params["c"] = c;
        s.test_only = id != "gauss-dip";
    } else if (id == "double-well-test") {
        s = radial_spec(id, [](double r) { return (r * r - 1.0) * (r * r - 1.0); },
                        [](double r) { return 4.0 * r * (r * r - 1.0); }, 1.0, 1.0, 1e6);
        s.test_only = true;
    } else if (id == "quadratic-test") {
        s = radial_spec(id, [](double r) { return 0.5 * r * r; }, [](double r) { return r; }, 1.0, 1.0, 1.0);
        s.test_only = true;
    } else if (id == "zero-flux-test") {
        s = radial_spec(id, [](double) { return 0.0; }, [](double) { return 0.0; }, 1.0, 1.0, 0.0);
        s.test_only = true;
    } else if (id == "linear-test") {
        s.id = id;
        s.radial = false;
        s.value = [](const Vec2& A) { return 1.0 + 0.3 * A[0] - 0.2 * A[1]; };
        s.gradf = [](const Vec2&) { return Vec2{0.3, -0.2}; };
        s.flux_lip = 0.0;
        s.test_only = true;
    } else {
        throw Rejected("unknown potential '" + id + "'");
    }
    s.dim = dim;
    if (id == "linear-test" && dim == 1)
        s.gradf = [](const Vec2&) { return Vec2{0.3, 0.0}; };
    s.lambda_lo = param("lambda", s.lambda_lo);
    s.lambda_hi = param("Lambda", s.lambda_hi);
    for (auto& [k, v] : params) s.params[k] = v;
    return s;
}

// ---------------------------------------------------------------- envelope

Vec2 ConvexEnvelope::point(std::size_t k) const {
    if (dim == 1) return {axis[k], 0.0};
    return {axis[k % n], axis[k / n]};
}

namespace {

// locate x on a uniform axis: cell index and weight of the right node
std::pair<int, double> locate(const std::vector<double>& axis, double x) {
    const int n = static_cast<int>(axis.size());
    const double h = axis[1] - axis[0];
    double s = (x - axis[0]) / h;
    s = std::clamp(s, 0.0, static_cast<double>(n - 1));
    int i = std::min(static_cast<int>(s), n - 2);
    return {i, s - i};
}

}  // namespace

double ConvexEnvelope::eval(const Vec2& A) const {
    auto [i, w] = locate(axis, A[0]);
    if (dim == 1) return (1 - w) * env[i] + w * env[i + 1];
    auto [j, v] = locate(axis, A[1]);
    return (1 - w) * (1 - v) * env[index(i, j)] + w * (1 - v) * env[index(i + 1, j)] +
           (1 - w) * v * env[index(i, j + 1)] + w * v * env[index(i + 1, j + 1)];
}

Vec2 ConvexEnvelope::slope(const Vec2& A) const {
    auto [i, w] = locate(axis, A[0]);
    if (dim == 1) return (1 - w) * grad[i] + w * grad[i + 1];
    auto [j, v] = locate(axis, A[1]);
    return (1 - w) * (1 - v) * grad[index(i, j)] + w * (1 - v) * grad[index(i + 1, j)] +
           (1 - w) * v * grad[index(i, j + 1)] + w * v * grad[index(i + 1, j + 1)];
}

namespace {

void check_uniform(const std::vector<double>& x) {
    if (x.size() < 3) throw Rejected("convexify: need at least 3 samples");
    for (double v : x)
        if (!std::isfinite(v)) throw Rejected("convexify: non-finite abscissa");
    const double h = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
    if (!(h > 0.0)) throw Rejected("convexify: abscissae must increase");
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        if (std::abs((x[i + 1] - x[i]) - h) > 1e-9 * h) throw Rejected("convexify: non-uniform grid");
}

}  // namespace

ConvexEnvelope convexify_1d(const std::vector<double>& x, const std::vector<double>& y, double tol_coinc) {
    check_uniform(x);
    if (y.size() != x.size()) throw Rejected("convexify: size mismatch");
    for (double v : y)
        if (!std::isfinite(v)) throw Rejected("convexify: NaN or infinite sample");
    const int n = static_cast<int>(x.size());

    // monotone chain, lower part
    std::vector<int> hull;
    for (int i = 0; i < n; ++i) {
        while (hull.size() >= 2) {
            const int o = hull[hull.size() - 2], a = hull.back();
            const double cr = (x[a] - x[o]) * (y[i] - y[o]) - (y[a] - y[o]) * (x[i] - x[o]);
            if (cr > 0.0) break;
            hull.pop_back();
        }
        hull.push_back(i);
    }

    ConvexEnvelope e;
    e.dim = 1;
    e.n = n;
    e.axis = x;
    e.phi = y;
    e.spacing = (x.back() - x.front()) / (n - 1);
    e.r_max = std::max(std::abs(x.front()), std::abs(x.back()));
    e.r_report = e.r_max;
    e.env.resize(n);
    e.grad.assign(n, Vec2{0.0, 0.0});
    e.coincidence.assign(n, 0);

    std::vector<double> seg(hull.size() > 1 ? hull.size() - 1 : 1, 0.0);
    for (std::size_t k = 0; k + 1 < hull.size(); ++k)
        seg[k] = (y[hull[k + 1]] - y[hull[k]]) / (x[hull[k + 1]] - x[hull[k]]);
    for (std::size_t k = 0; k + 1 < hull.size(); ++k) {
        const int a = hull[k], b = hull[k + 1];
        for (int i = a; i <= b; ++i) {
            const double w = (x[i] - x[a]) / (x[b] - x[a]);
            e.env[i] = (i == a) ? y[a] : (i == b ? y[b] : (1 - w) * y[a] + w * y[b]);
            if (i > a && i < b) e.grad[i] = {seg[k], 0.0};
        }
    }
    for (std::size_t k = 0; k < hull.size(); ++k) {
        const double l = k > 0 ? seg[k - 1] : seg[0];
        const double r = k + 1 < hull.size() ? seg[k] : seg[seg.size() - 1];
        e.grad[hull[k]] = {0.5 * (l + r), 0.0};
    }
    for (int i = 0; i < n; ++i) {
        e.env[i] = std::min(e.env[i], y[i]);
        e.coincidence[i] = std::abs(y[i] - e.env[i]) <= tol_coinc * (1.0 + std::abs(y[i]));
    }
    for (int i = 0; i < n;) {
        if (e.coincidence[i]) {
            ++i;
            continue;
        }
        int j = i;
        while (j + 1 < n && !e.coincidence[j + 1]) ++j;
        const int a = std::max(i - 1, 0), b = std::min(j + 1, n - 1);
        e.contact_points.emplace_back(x[a], x[b]);
        if (a == 0 || b == n - 1) {
            e.reliable = false;
            e.note = "non-coincidence interval reaches the box boundary";
        }
        i = j + 1;
    }
    return e;
}

namespace {

// One separable sup-transform pass: out[o][t] = max_k (s_t * a_k + sign * in(o,k)), in(o,k) with
// stride, returning argmax k. Used four times for the double transform.
void sup_pass(int n, const std::vector<double>& a, const std::vector<double>& s, const std::vector<double>& in,
              bool in_rows, double sign, std::vector<double>& out, std::vector<int>& arg, bool parallel) {
    auto body = [&](int o) {
        for (int t = 0; t < n; ++t) {
            double best = -std::numeric_limits<double>::infinity();
            int bk = 0;
            for (int k = 0; k < n; ++k) {
                const double v = in_rows ? in[static_cast<std::size_t>(o) + static_cast<std::size_t>(n) * k]
                                         : in[static_cast<std::size_t>(k) + static_cast<std::size_t>(n) * o];
                const double c = s[t] * a[k] + sign * v;
                if (c > best) {
                    best = c;
                    bk = k;
                }
            }
            out[static_cast<std::size_t>(o) + static_cast<std::size_t>(n) * t] = best;
            arg[static_cast<std::size_t>(o) + static_cast<std::size_t>(n) * t] = bk;
        }
    };
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (int o = 0; o < n; ++o) body(o);
    } else {
        for (int o = 0; o < n; ++o) body(o);
    }
}

}  // namespace

ConvexEnvelope convexify_nd(const std::vector<double>& axis, const std::vector<double>& values, double slope_bound,
                            double pad_frac, double tol_coinc, bool parallel, const std::vector<Vec2>& extra) {
    check_uniform(axis);
    const int n = static_cast<int>(axis.size());
    if (values.size() != static_cast<std::size_t>(n) * n) throw Rejected("convexify_nd: size mismatch");
    if (std::abs(axis.front() + axis.back()) > 1e-9 * std::abs(axis.back())) throw Rejected("convexify_nd: box must be symmetric");
    for (double v : values)
        if (!std::isfinite(v)) throw Rejected("convexify_nd: NaN or infinite sample");
    if (!(slope_bound > 0.0)) throw Rejected("convexify_nd: slope bound must be positive");

    std::vector<double> s(n);
    for (int k = 0; k < n; ++k) s[k] = -slope_bound + 2.0 * slope_bound * k / (n - 1);
    const std::size_t nn = static_cast<std::size_t>(n) * n;
    // values indexed (i along axis0) + n * (j along axis1)
    // g(i, t) = max_j s_t A_j - Φ(i, j)
    std::vector<double> g(nn), conj(nn), H(nn), env(nn);
    std::vector<int> argj(nn), argi(nn), argt(nn), args(nn);
    sup_pass(n, axis, s, values, false, -1.0, g, argj, parallel);
    // Φ*(σ, t) = max_i s_σ A_i + g(i, t); g stored as g[i + n t] -> read rows over i for fixed t
    {
        std::vector<double> gt(nn);
        for (int i = 0; i < n; ++i)
            for (int t = 0; t < n; ++t) gt[static_cast<std::size_t>(t) + n * static_cast<std::size_t>(i)] = g[i + static_cast<std::size_t>(n) * t];
        // gt[t + n i]; pass over k = i for fixed o = t
        std::vector<double> out(nn);
        std::vector<int> arg(nn);
        sup_pass(n, axis, s, gt, true, 1.0, out, arg, parallel);
        // out[t + n σ] = Φ*(σ, t)
        for (int t = 0; t < n; ++t)
            for (int sg = 0; sg < n; ++sg) {
                conj[static_cast<std::size_t>(sg) + n * static_cast<std::size_t>(t)] = out[t + static_cast<std::size_t>(n) * sg];
                argi[static_cast<std::size_t>(sg) + n * static_cast<std::size_t>(t)] = arg[t + static_cast<std::size_t>(n) * sg];
            }
    }
    // H(σ, j) = max_t A_j s_t - Φ*(σ, t)   (conj indexed σ + n t)
    sup_pass(n, s, axis, conj, false, -1.0, H, argt, parallel);
    // Φ**(i, j) = max_σ A_i s_σ + H(σ, j)
    {
        std::vector<double> Ht(nn);
        for (int sg = 0; sg < n; ++sg)
            for (int j = 0; j < n; ++j) Ht[static_cast<std::size_t>(j) + n * static_cast<std::size_t>(sg)] = H[sg + static_cast<std::size_t>(n) * j];
        std::vector<double> out(nn);
        std::vector<int> arg(nn);
        sup_pass(n, s, axis, Ht, true, 1.0, out, arg, parallel);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                env[static_cast<std::size_t>(i) + n * static_cast<std::size_t>(j)] = out[j + static_cast<std::size_t>(n) * i];
                args[static_cast<std::size_t>(i) + n * static_cast<std::size_t>(j)] = arg[j + static_cast<std::size_t>(n) * i];
            }
    }

    // extra slopes: conjugate by brute force, then one more max over their minorants
    std::vector<int> won(nn, -1), contact(extra.size(), 0);
    if (!extra.empty()) {
        const long ne = static_cast<long>(extra.size());
        std::vector<double> cj(extra.size());
#pragma omp parallel for schedule(static) if (parallel)
        for (long m = 0; m < ne; ++m) {
            double best = -std::numeric_limits<double>::infinity();
            int arg = 0;
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) {
                    const std::size_t k = static_cast<std::size_t>(i) + static_cast<std::size_t>(n) * j;
                    const double v = extra[m][0] * axis[i] + extra[m][1] * axis[j] - values[k];
                    if (v > best) best = v, arg = static_cast<int>(k);
                }
            cj[m] = best;
            contact[m] = arg;
        }
#pragma omp parallel for schedule(static) if (parallel)
        for (long k = 0; k < static_cast<long>(nn); ++k) {
            const double x = axis[k % n], y = axis[k / n];
            for (long m = 0; m < ne; ++m) {
                const double v = extra[m][0] * x + extra[m][1] * y - cj[m];
                if (v > env[k]) env[k] = v, won[k] = static_cast<int>(m);
            }
        }
    }

    ConvexEnvelope e;
    e.dim = 2;
    e.n = n;
    e.extra_slopes = extra;
    e.axis = axis;
    e.phi = values;
    e.spacing = axis[1] - axis[0];
    e.r_max = axis.back();
    e.r_report = axis.back() * (1.0 - pad_frac);
    e.slope_bound = slope_bound;
    e.env = env;
    e.grad.assign(nn, Vec2{0.0, 0.0});
    e.coincidence.assign(nn, 0);
    // the slope grid limits accuracy at coincident points to about Δs·h
    const double lf_err = (2.0 * slope_bound / (n - 1)) * e.spacing;
    for (std::size_t k = 0; k < nn; ++k) {
        e.env[k] = std::min(e.env[k], values[k]);
        e.coincidence[k] = std::abs(values[k] - e.env[k]) <= tol_coinc * (1.0 + std::abs(values[k])) + lf_err;
    }
    const double h = e.spacing;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const int il = std::max(i - 1, 0), ir = std::min(i + 1, n - 1);
            const int jl = std::max(j - 1, 0), jr = std::min(j + 1, n - 1);
            e.grad[e.index(i, j)] = {(env[e.index(ir, j)] - env[e.index(il, j)]) / ((ir - il) * h),
                                     (env[e.index(i, jr)] - env[e.index(i, jl)]) / ((jr - jl) * h)};
        }
    // reliability: the supporting slope of every reported point must be interior to the
    // slope box, and its primal contact must not sit on the sample box boundary
    int bad = 0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            if (std::abs(axis[i]) > e.r_report + 1e-12 || std::abs(axis[j]) > e.r_report + 1e-12) continue;
            if (const int m = won[e.index(i, j)]; m >= 0) {
                const int pi = contact[m] % n, pj = contact[m] / n;
                const bool sat = std::abs(extra[m][0]) >= slope_bound || std::abs(extra[m][1]) >= slope_bound;
                if (sat || pi == 0 || pi == n - 1 || pj == 0 || pj == n - 1) ++bad;
                continue;
            }
            const int sg = args[e.index(i, j)];
            const int t = argt[static_cast<std::size_t>(sg) + n * static_cast<std::size_t>(j)];
            const int pi = argi[static_cast<std::size_t>(sg) + n * static_cast<std::size_t>(t)];
            const int pj = argj[static_cast<std::size_t>(pi) + n * static_cast<std::size_t>(t)];
            const bool sat = sg == 0 || sg == n - 1 || t == 0 || t == n - 1;
            const bool edge = pi == 0 || pi == n - 1 || pj == 0 || pj == n - 1;
            if (sat || edge) ++bad;
        }
    if (bad > 0) {
        e.reliable = false;
        e.note = std::to_string(bad) + " reported samples supported by the box boundary or slope limit";
    }
    return e;
}

ConvexEnvelope build_envelope(const PotentialSpec& spec, double r_max, int samples, const PotentialTolerances& tol) {
    if (!(r_max > 0.0)) throw Rejected("envelope: r_max must be positive");
    if (samples < 5) throw Rejected("envelope: too few samples");
    if (samples % 2 == 0) ++samples;  // keep A = 0 on the grid
    std::vector<double> axis(samples);
    for (int k = 0; k < samples; ++k) axis[k] = -r_max + 2.0 * r_max * k / (samples - 1);
    if (spec.dim == 1) {
        std::vector<double> y(samples);
        for (int k = 0; k < samples; ++k) y[k] = spec.eval({axis[k], 0.0});
        ConvexEnvelope e = convexify_1d(axis, y, tol.tol_coinc);
        // q only well inside the coincidence set; next to a flat piece the hull slope keeps p monotone
        for (int k = 1; k + 1 < samples; ++k)
            if (e.coincidence[k - 1] && e.coincidence[k] && e.coincidence[k + 1]) e.grad[k] = spec.grad({axis[k], 0.0});
        return e;
    }
    const std::size_t nn = static_cast<std::size_t>(samples) * samples;
    std::vector<double> v(nn);
    double qmax = 0.0;
    for (int j = 0; j < samples; ++j)
        for (int i = 0; i < samples; ++i) {
            const Vec2 A{axis[i], axis[j]};
            v[static_cast<std::size_t>(i) + static_cast<std::size_t>(samples) * j] = spec.eval(A);
            qmax = std::max(qmax, norm(spec.grad(A)));
        }
    // exact gradients as extra slopes, deduplicated and thinned to keep the brute force bounded
    std::vector<Vec2> extra;
    {
        std::set<std::pair<long long, long long>> seen;
        for (int j = 0; j < samples; ++j)
            for (int i = 0; i < samples; ++i) {
                const Vec2 q = spec.grad({axis[i], axis[j]});
                if (seen.insert({std::llround(q[0] * 1e12), std::llround(q[1] * 1e12)}).second) extra.push_back(q);
            }
        const std::size_t cap = 8192;
        if (extra.size() > cap) {
            std::vector<Vec2> thin;
            const double stride = static_cast<double>(extra.size()) / cap;
            for (std::size_t k = 0; k < cap; ++k) thin.push_back(extra[static_cast<std::size_t>(k * stride)]);
            extra.swap(thin);
        }
    }
    ConvexEnvelope e = convexify_nd(axis, v, 1.25 * qmax + 1e-12, 0.25, tol.tol_coinc, true, extra);
    for (int j = 1; j + 1 < samples; ++j)
        for (int i = 1; i + 1 < samples; ++i) {
            const std::size_t k = e.index(i, j);
            if (e.coincidence[k] && e.coincidence[k - 1] && e.coincidence[k + 1] && e.coincidence[k - samples] &&
                e.coincidence[k + samples])
                e.grad[k] = spec.grad(e.point(k));
        }
    return e;
}

// ---------------------------------------------------------------- radial hull

int RadialHull::piece(double r) const {
    for (std::size_t k = 0; k < intervals.size(); ++k)
        if (r > intervals[k].first && r < intervals[k].second) return static_cast<int>(k);
    return -1;
}

double RadialHull::env(double r) const {
    const int k = piece(r);
    if (k < 0) return hs(r);
    const double c1 = intervals[k].first;
    return hs(std::abs(c1)) + slopes[k] * (r - c1);
}

double RadialHull::denv(double r) const {
    const int k = piece(r);
    return k < 0 ? dhs(r) : slopes[k];
}

Vec2 RadialHull::slope(const Vec2& A) const {
    const double r = norm(A);
    if (r == 0.0) return {0.0, 0.0};
    const double g = denv(r) / r;
    return g * A;
}

double RadialHull::gap(double r) const {
    const int k = piece(r);
    if (k < 0) return 0.0;
    return std::min(r - intervals[k].first, intervals[k].second - r);
}

namespace {

// common tangent of hs at c1 < c2; returns false if Newton does not settle
bool polish_tangent(const RadialHull& H, double& c1, double& c2, double h) {
    double a = c1, b = c2;
    for (int it = 0; it < 60; ++it) {
        const double da = H.dhs(a), db = H.dhs(b);
        const double F1 = da - db;
        const double F2 = da * (b - a) - (H.hs(b) - H.hs(a));
        const double scale = 1.0 + std::abs(H.hs(b));
        if (std::abs(F1) < 1e-15 * (1.0 + std::abs(da)) && std::abs(F2) < 1e-15 * scale) break;
        const double ea = 1e-6 * (1.0 + a), eb = 1e-6 * (1.0 + b);
        const double d2a = (H.dhs(a + ea) - H.dhs(a - ea)) / (2 * ea);
        const double d2b = (H.dhs(b + eb) - H.dhs(b - eb)) / (2 * eb);
        const double J11 = d2a, J12 = -d2b, J21 = d2a * (b - a), J22 = da - db;
        const double det = J11 * J22 - J12 * J21;
        if (!std::isfinite(det) || det == 0.0) return false;
        double sa = (F1 * J22 - F2 * J12) / det;
        double sb = (J11 * F2 - J21 * F1) / det;
        const double cap = 2.0 * h;
        const double m = std::max(std::abs(sa), std::abs(sb));
        if (m > cap) {
            sa *= cap / m;
            sb *= cap / m;
        }
        a -= sa;
        b -= sb;
        if (!(a < b) || a < 0.0) return false;
    }
    if (std::abs(a - c1) > 3 * h || std::abs(b - c2) > 3 * h) return false;
    c1 = a;
    c2 = b;
    return true;
}

bool polish_flat(const RadialHull& H, double& c, double h) {
    double x = c;
    for (int it = 0; it < 60; ++it) {
        const double f = H.dhs(x);
        const double e = 1e-6 * (1.0 + x);
        const double d = (H.dhs(x + e) - H.dhs(x - e)) / (2 * e);
        if (std::abs(f) < 1e-15) break;
        if (!(d > 0.0)) return false;
        double st = f / d;
        st = std::clamp(st, -2 * h, 2 * h);
        x -= st;
    }
    if (std::abs(x - c) > 3 * h || x <= 0.0) return false;
    c = x;
    return true;
}

}  // namespace

RadialHull radial_hull(const PotentialSpec& spec, double eps, double r_max, int samples) {
    if (!spec.radial) throw Rejected("radial hull: potential '" + spec.id + "' is not radial");
    RadialHull H;
    H.base = spec;
    H.eps = eps;
    H.r_max = r_max;
    if (samples % 2 == 0) ++samples;
    std::vector<double> x(samples), y(samples);
    for (int k = 0; k < samples; ++k) {
        x[k] = -r_max + 2.0 * r_max * k / (samples - 1);
        y[k] = H.hs(std::abs(x[k]));
    }
    const ConvexEnvelope e = convexify_1d(x, y, 1e-12);
    if (!e.reliable) H.reliable = false;
    const double h = e.spacing;
    for (auto [a, b] : e.contact_points) {
        if (b <= 0.0) continue;  // mirror image
        if (a < 0.0) {
            double c = b;
            polish_flat(H, c, h);
            H.intervals.emplace_back(-c, c);
            H.slopes.push_back(0.0);
        } else {
            double c1 = a, c2 = b;
            if (c2 < r_max) polish_tangent(H, c1, c2, h);
            H.intervals.emplace_back(c1, c2);
            H.slopes.push_back((H.hs(c2) - H.hs(c1)) / (c2 - c1));
        }
    }
    return H;
}

// ---------------------------------------------------------------- recession

std::vector<Vec2> sphere_directions(int dim, int count) {
    if (dim == 1) return {{1.0, 0.0}, {-1.0, 0.0}};
    std::vector<Vec2> d(count);
    for (int k = 0; k < count; ++k) {
        const double a = 2.0 * M_PI * k / count;
        d[k] = {std::cos(a), std::sin(a)};
    }
    return d;
}

namespace {
std::size_t nearest_dir(const std::vector<Vec2>& dirs, const Vec2& eta) {
    std::size_t best = 0;
    double bd = -2.0;
    for (std::size_t k = 0; k < dirs.size(); ++k) {
        const double c = dot(dirs[k], eta);
        if (c > bd) {
            bd = c;
            best = k;
        }
    }
    return best;
}
}  // namespace

double RecessionTable::phi_inf_at(const Vec2& eta) const { return phi_inf[nearest_dir(directions, eta)]; }
double RecessionTable::qI_inf_at(const Vec2& eta) const { return qI_inf[nearest_dir(directions, eta)]; }

RecessionTable recession(const PotentialSpec& spec, const ConvexEnvelope* env, int n_dirs, std::vector<double> t_probe,
                         const PotentialTolerances& tol) {
    RecessionTable R;
    R.directions = sphere_directions(spec.dim, n_dirs);
    if (t_probe.empty())
        for (double t = 64.0; t <= 1024.0; t *= 2.0) t_probe.push_back(t);
    for (std::size_t k = 1; k < t_probe.size(); ++k)
        if (!(t_probe[k] > t_probe[k - 1])) throw Rejected("recession: probe radii must increase");
    if (t_probe.size() < 2) throw Rejected("recession: need at least two probe radii");
    R.t_probe = t_probe;
    const double t2 = t_probe.back(), t1 = t_probe[t_probe.size() - 2];
    for (const Vec2& eta : R.directions) {
        auto v = [&](double t) { return spec.eval(t * eta) / t; };
        auto w = [&](double t) { return dot(spec.grad(t * eta), eta); };
        const double v1 = v(t1), v2 = v(t2), w1 = w(t1), w2 = w(t2);
        // Richardson for an O(1/t) remainder; exact when t2 = 2 t1
        const double r = t2 / t1;
        R.phi_inf.push_back((r * v2 - v1) / (r - 1.0));
        R.qI_inf.push_back((r * w2 - w1) / (r - 1.0));
        // converged when two successive extrapolations agree; plain difference with two probes
        if (t_probe.size() >= 3) {
            const double t0 = t_probe[t_probe.size() - 3], r0 = t1 / t0;
            const double pv = (r0 * v1 - v(t0)) / (r0 - 1.0), pw = (r0 * w1 - w(t0)) / (r0 - 1.0);
            R.converged.push_back(std::abs(R.phi_inf.back() - pv) < tol.tol_rec && std::abs(R.qI_inf.back() - pw) < tol.tol_rec);
        } else {
            R.converged.push_back(std::abs(v2 - v1) < tol.tol_rec && std::abs(w2 - w1) < tol.tol_rec);
        }
        if (env) {
            const double inf_norm = std::max(std::abs(eta[0]), std::abs(eta[1]));
            const double s2 = env->r_report / inf_norm, s1 = 0.5 * s2;
            const double e1 = env->eval(s1 * eta) / s1, e2 = env->eval(s2 * eta) / s2;
            R.env_inf.push_back(2.0 * e2 - e1);
            R.env_tol = std::max(tol.tol_rec, 4.0 / (s2 * s2));
        }
    }
    return R;
}

// ---------------------------------------------------------------- admissibility

const AdmissibilityEntry& AdmissibilityReport::get(const std::string& name) const {
    for (const auto& e : entries)
        if (e.name == name) return e;
    throw Rejected("admissibility: no entry '" + name + "'");
}

bool AdmissibilityReport::structure_ok() const {
    for (const char* k : {"SH1", "SH2", "SH3", "SH4", "recession_converged", "envelope_convex", "envelope_dominance",
                          "envelope_reliable"})
        if (!passed(k)) return false;
    return true;
}

bool AdmissibilityReport::strong_ok() const { return structure_ok() && passed("H1") && passed("H2"); }

namespace {
std::string fmt_point(const Vec2& A, int dim) {
    std::ostringstream s;
    s.precision(6);
    s << "A=(" << A[0];
    if (dim == 2) s << "," << A[1];
    s << ")";
    return s.str();
}
}  // namespace

AdmissibilityReport check_admissibility(const PotentialSpec& spec, const ConvexEnvelope& env, const RecessionTable& rec,
                                        const PotentialTolerances& tol, std::uint64_t seed) {
    AdmissibilityReport rep;
    rep.potential = spec.id;
    const double lam = spec.lambda_lo, Lam = spec.lambda_hi;
    auto add = [&](std::string name, bool pass, double res, std::string detail = {}) {
        rep.entries.push_back({std::move(name), pass, res, std::move(detail)});
    };
    auto in_report = [&](const Vec2& A) {
        return std::abs(A[0]) <= env.r_report + 1e-12 && std::abs(A[1]) <= env.r_report + 1e-12;
    };
    const std::size_t N = env.size();

    {  // SH1
        const double phi0 = spec.eval({0.0, 0.0});
        double mn = phi0;
        Vec2 arg{0.0, 0.0};
        for (std::size_t k = 0; k < N; ++k)
            if (env.phi[k] < mn) {
                mn = env.phi[k];
                arg = env.point(k);
            }
        const double q0 = norm(spec.grad({0.0, 0.0}));
        const double res = std::max(phi0 - mn, q0);
        add("SH1", phi0 - mn <= tol.tol_min * (1.0 + std::abs(phi0)) && q0 <= tol.tol_struct, res,
            phi0 > mn ? "minimum at " + fmt_point(arg, spec.dim) : "");
    }
    {  // SH2
        double worst = 0.0;
        std::string where;
        for (std::size_t k = 0; k < N; ++k) {
            const Vec2 A = env.point(k);
            const double r = norm(A), f = env.phi[k], q = norm(spec.grad(A));
            const double v = std::max({std::max(lam * r - 1.0, 0.0) - f, f - (Lam * r + 1.0), q - Lam});
            if (v > worst) {
                worst = v;
                where = "violating sample " + fmt_point(A, spec.dim) + (q - Lam >= v ? " (|q| > Lambda)" : " (growth bound)");
            }
        }
        add("SH2", worst <= tol.tol_struct, worst, where);
    }
    {  // recession convergence and SH3
        bool conv = true;
        for (auto c : rec.converged) conv = conv && c;
        add("recession_converged", conv, 0.0, conv ? "" : "Phi(t eta)/t did not stabilise");
        double d1 = 0.0, d2 = 0.0;
        for (std::size_t k = 0; k < rec.directions.size(); ++k) {
            d1 = std::max(d1, std::abs(rec.qI_inf[k] - rec.phi_inf[k]));
            if (!rec.env_inf.empty()) d2 = std::max(d2, std::abs(rec.phi_inf[k] - rec.env_inf[k]));
        }
        add("SH3", conv && d1 <= tol.tol_rec && d2 <= std::max(rec.env_tol, tol.tol_rec), std::max(d1, d2));
        double worst = 0.0;
        for (std::size_t k = 0; k < rec.directions.size(); ++k) worst = std::max(worst, rec.phi_inf[k] - Lam);
        add("phi_inf_bound", worst <= tol.tol_rec, worst);
    }
    {  // SH4 on the coincidence set inside the box
        double worst = -std::numeric_limits<double>::infinity();
        std::string where;
        for (std::size_t k = 0; k < N; ++k) {
            if (!env.coincidence[k]) continue;
            const Vec2 xi = env.point(k);
            if (!in_report(xi)) continue;
            const Vec2 q = spec.grad(xi);
            for (std::size_t d = 0; d < rec.directions.size(); ++d) {
                const double v = dot(q, rec.directions[d]) - rec.qI_inf[d];
                if (v > worst) {
                    worst = v;
                    where = "worst at " + fmt_point(xi, spec.dim);
                }
            }
        }
        add("SH4", worst <= tol.tol_rec, std::max(worst, 0.0), where);
    }
    {  // H2
        double asym = 0.0;
        for (std::size_t k = 0; k < rec.directions.size(); ++k) {
            const Vec2 m = -1.0 * rec.directions[k];
            asym = std::max(asym, std::abs(rec.phi_inf[k] - rec.phi_inf_at(m)));
        }
        double neg = 0.0;
        for (std::size_t k = 0; k < N; ++k) {
            const Vec2 A = env.point(k);
            neg = std::max(neg, -dot(spec.grad(A), A));
        }
        add("H2", asym <= tol.tol_rec && neg <= tol.tol_struct, std::max(asym, neg));
    }
    {  // H1: midpoint convexity of the perspective function
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> U(-1.0, 1.0), S(0.0, 2.0), P(0.0, 1.0);
        const double R = env.r_report;
        auto persp = [&](const Vec2& xi, double s) {
            if (s == 0.0) {
                const double r = norm(xi);
                return r == 0.0 ? 0.0 : r * rec.phi_inf_at((1.0 / r) * xi);
            }
            return s * spec.eval((1.0 / s) * xi);
        };
        double worst = 0.0;
        for (int k = 0; k < 4000; ++k) {
            Vec2 x{R * U(rng), spec.dim == 2 ? R * U(rng) : 0.0}, y{R * U(rng), spec.dim == 2 ? R * U(rng) : 0.0};
            const double sx = P(rng) < 0.1 ? 0.0 : S(rng), sy = P(rng) < 0.1 ? 0.0 : S(rng);
            const Vec2 m = 0.5 * (x + y);
            const double sm = 0.5 * (sx + sy);
            const double lhs = persp(m, sm), rhs = 0.5 * (persp(x, sx) + persp(y, sy));
            worst = std::max(worst, (lhs - rhs) / (1.0 + std::abs(rhs)));
        }
        add("H1", worst <= std::max(tol.tol_rec, tol.tol_conv), worst);
    }
    // second differences along grid lines
    auto min_second_diff = [&](const std::vector<double>& f, bool relative) {
        double worst = 0.0;
        const int n = env.n;
        const int ny = env.dim == 2 ? n : 1;
        for (int j = 0; j < ny; ++j)
            for (int i = 1; i + 1 < n; ++i) {
                const std::size_t k = env.index(i, j);
                const double d = f[env.index(i - 1, j)] - 2 * f[k] + f[env.index(i + 1, j)];
                worst = std::min(worst, relative ? d / (1.0 + std::abs(f[k])) : d);
            }
        if (env.dim == 2)
            for (int j = 1; j + 1 < n; ++j)
                for (int i = 0; i < n; ++i) {
                    const std::size_t k = env.index(i, j);
                    const double d = f[env.index(i, j - 1)] - 2 * f[k] + f[env.index(i, j + 1)];
                    worst = std::min(worst, relative ? d / (1.0 + std::abs(f[k])) : d);
                }
        return worst;
    };
    {
        const double d = min_second_diff(env.phi, true);
        add("phi_convex", d >= -tol.tol_conv, -d, d < -tol.tol_conv ? "Phi has negative second differences" : "");
        const double de = min_second_diff(env.env, true);
        add("envelope_convex", de >= -tol.tol_conv, -de);
    }
    {
        double worst = 0.0;
        for (std::size_t k = 0; k < N; ++k) worst = std::max(worst, env.env[k] - env.phi[k]);
        add("envelope_dominance", worst <= tol.tol_conv, worst);
    }
    {  // structure bounds inherited by Φ**
        double worst = 0.0;
        for (std::size_t k = 0; k < N; ++k) {
            const Vec2 A = env.point(k);
            if (!in_report(A)) continue;
            const double r = norm(A), f = env.env[k];
            worst = std::max({worst, std::max(lam * r - 1.0, 0.0) - f, f - (Lam * r + 1.0), norm(env.grad[k]) - Lam});
        }
        add("envelope_structure", worst <= tol.tol_conv, worst);
    }
    {  // monotonicity of p along grid lines
        double worst = 0.0;
        const int n = env.n;
        const int ny = env.dim == 2 ? n : 1;
        auto inside = [&](int i, int j) { return in_report(env.point(env.index(i, j))); };
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i + 1 < n; ++i)
                if (inside(i, j) && inside(i + 1, j))
                    worst = std::min(worst, env.grad[env.index(i + 1, j)][0] - env.grad[env.index(i, j)][0]);
        if (env.dim == 2)
            for (int j = 0; j + 1 < n; ++j)
                for (int i = 0; i < n; ++i)
                    if (inside(i, j) && inside(i, j + 1))
                        worst = std::min(worst, env.grad[env.index(i, j + 1)][1] - env.grad[env.index(i, j)][1]);
        add("p_monotone", worst >= -tol.tol_mono, -worst);
    }
    add("envelope_reliable", env.reliable, 0.0, env.note);
    return rep;
}

}  // namespace ymflow
