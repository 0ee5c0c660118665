#include "ymflow/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>

#include "ymflow/acceptance.hpp"
#include "ymflow/io.hpp"

namespace ymflow {

namespace fs = std::filesystem;
using nlohmann::json;

Setup prepare(const RunConfig& c) {
    Setup s;
    s.spec = make_potential(c.potential, c.dim, c.potential_params);
    PotentialTolerances pt;
    pt.tol_coinc = c.tol.tol_coinc;
    pt.tol_conv = c.tol.tol_conv;
    pt.tol_rec = c.tol.tol_rec;
    s.env = build_envelope(s.spec, c.envelope_r_max, c.envelope_samples, pt);
    s.rec = recession(s.spec, &s.env, 16, {}, pt);
    s.admissibility = check_admissibility(s.spec, s.env, s.rec, pt, c.seed);
    if (s.spec.radial) {
        const double r = std::max(8.0, c.r_hist * (c.dim == 2 ? std::sqrt(2.0) : 1.0)) + 1.0;
        s.hull = radial_hull(s.spec, 0.0, r, c.hull_samples);
        s.oracle = CoincidenceOracle::radial(*s.hull);
    } else {
        s.oracle = CoincidenceOracle::sampled(s.env);
    }
    return s;
}

ScheduleSettings schedule_settings(const RunConfig& c) {
    ScheduleSettings st;
    st.mode = c.flux_mode();
    st.time = c.time();
    st.mollifier_scale = c.mollifier_scale;
    st.r_max = c.flux_r_max;
    st.hull_samples = c.hull_samples;
    st.K = c.members;
    st.jobs = c.jobs;
    return st;
}

BinSpec bin_spec(const RunConfig& c) { return BinSpec{c.dim, c.per_axis, c.r_hist, c.sphere_bins}; }

EstimateSettings estimate_settings(const RunConfig& c) { return EstimateSettings{c.window, c.cutoff_quantile, c.members}; }

namespace {

StructuralReport worst_of(const std::vector<StructuralReport>& v) {
    StructuralReport w;
    if (v.empty()) return w;
    w.jf_residual_min = w.jf_residual_min_rel = w.jensen_worst = std::numeric_limits<double>::infinity();
    for (const auto& r : v) {
        w.support_violation_mass = std::max(w.support_violation_mass, r.support_violation_mass);
        w.independence_l1 = std::max(w.independence_l1, r.independence_l1);
        w.independence_max = std::max(w.independence_max, r.independence_max);
        w.jf_residual_min = std::min(w.jf_residual_min, r.jf_residual_min);
        w.jf_residual_min_rel = std::min(w.jf_residual_min_rel, r.jf_residual_min_rel);
        w.jf_equality_gap = std::max(w.jf_equality_gap, r.jf_equality_gap);
        w.jf_equality_gap_rel = std::max(w.jf_equality_gap_rel, r.jf_equality_gap_rel);
        w.barycenter_interior = std::max(w.barycenter_interior, r.barycenter_interior);
        w.barycenter_boundary = std::max(w.barycenter_boundary, r.barycenter_boundary);
        if (r.jensen_worst < w.jensen_worst) {
            w.jensen_worst = r.jensen_worst;
            w.jensen_worst_entry = r.jensen_worst_entry;
        }
    }
    return w;
}

json structural_json(const StructuralReport& r) {
    return {{"support_violation_mass", r.support_violation_mass}, {"independence_l1", r.independence_l1},
            {"independence_max", r.independence_max},             {"jf_residual_min", r.jf_residual_min},
            {"jf_equality_gap", r.jf_equality_gap},               {"jf_residual_min_rel", r.jf_residual_min_rel},
            {"jf_equality_gap_rel", r.jf_equality_gap_rel},       {"barycenter_interior", r.barycenter_interior},
            {"barycenter_boundary", r.barycenter_boundary},       {"jensen_worst", r.jensen_worst},
            {"jensen_worst_entry", r.jensen_worst_entry}};
}

json admissibility_json(const AdmissibilityReport& a) {
    json j = {{"potential", a.potential}, {"structure_ok", a.structure_ok()}, {"strong_ok", a.strong_ok()},
              {"convex", a.convex()}};
    for (const auto& e : a.entries)
        j["entries"].push_back({{"name", e.name}, {"pass", e.pass}, {"residual", e.residual}, {"detail", e.detail}});
    return j;
}

std::vector<std::string> failing_entries(const AdmissibilityReport& a) {
    std::vector<std::string> v;
    for (const char* k : {"SH1", "SH2", "SH3", "SH4", "recession_converged", "envelope_convex", "envelope_dominance",
                          "envelope_reliable"})
        if (!a.passed(k)) v.emplace_back(k);
    return v;
}

// collects artifact names and writes manifest.json last
struct Manifest {
    std::string command;
    const RunConfig& cfg;
    fs::path dir;
    std::vector<std::string> artifacts{};
    json extra = json::object();

    fs::path add(const std::string& name) {
        artifacts.push_back(name);
        return dir / name;
    }
    void write(const std::string& status) {
        json j = {{"command", command}, {"config_hash", config_hash(cfg)}, {"config", to_json(cfg)}, {"seed", cfg.seed},
                  {"status", status}, {"artifacts", artifacts}};
        j.update(extra);
        write_json(dir / "manifest.json", j);
    }
};

std::size_t laminated(const GeneralizedYoungMeasure& m) {
    std::size_t n = 0;
    for (const auto& h : m.nu) {
        bool two = false;
        for (std::size_t a = 0; a < h.size() && !two; ++a)
            for (std::size_t b = a + 1; b < h.size() && !two; ++b)
                two = norm(h[a].atom - h[b].atom) > m.bins.width();
        n += two;
    }
    return n;
}

}  // namespace

ContinuationOutcome run_continuation(const RunConfig& c, const Setup& s, const ScalarField& u0) {
    ContinuationOutcome o;
    o.bundle = run_schedule(EpsilonSchedule{c.eps}, u0, s.spec, schedule_settings(c));
    const LimitBundle& b = o.bundle;
    if (b.members.size() >= 2) {
        const BinSpec bins = bin_spec(c);
        const RadialHull* hull = s.hull ? &*s.hull : nullptr;
        for (std::size_t k = 0; k < b.times.size(); ++k) {
            o.measures.push_back(estimate(b, k, bins, estimate_settings(c)));
            o.reports.push_back(structural_report(o.measures.back(), b.u_limit[k], s.spec, s.rec, s.oracle, hull));
        }
        o.worst = worst_of(o.reports);
        o.laminated_sites = laminated(o.measures.back());
        o.weak = weak_form_residual(b, o.measures, s.spec, c.weak_modes);
    }
    if (b.members.size() >= 3) o.bounds = verify_lemma25(b.members, bounds_budget(u0, s.spec, c.tol.C_M), c.tol.tol_uniform);
    return o;
}

std::vector<SubCheck> structural_checks(const RunConfig& c, const Setup& s, const ContinuationOutcome& o) {
    const Tolerances& t = c.tol;
    const double width = bin_spec(c).width(), vol = c.grid().volume(), Lam = s.spec.lambda_hi;
    double bary = 0.0;
    for (const auto& x : o.reports) bary = std::max(bary, x.barycenter_interior + x.barycenter_boundary);
    const StructuralReport& q = o.worst;
    auto le = [](std::string n, double m, double b, std::string d = {}) { return SubCheck{std::move(n), m <= b, m, b, std::move(d)}; };
    auto ge = [](std::string n, double m, double b, std::string d = {}) { return SubCheck{std::move(n), m >= b, m, b, std::move(d)}; };
    return {le("support_violation_mass", q.support_violation_mass, t.support_mass),
            le("independence_l1", q.independence_l1, 2.0 * width * Lam * vol, "budget 2 * bin width * Lambda * |Omega|"),
            ge("jf_min_residual_rel", q.jf_residual_min_rel, -t.tol_jf),
            le("jf_equality_gap_rel", q.jf_equality_gap_rel, t.tol_jf),
            le("barycenter", bary, 2.0 * width * vol),
            ge("jensen_worst", q.jensen_worst, -t.tol_jensen, q.jensen_worst_entry)};
}

ContractionOutcome run_contraction(const RunConfig& c, const Setup& s, const ScalarField& a, const ScalarField& b,
                                   int i1_every) {
    if (!(a.grid == b.grid)) throw Rejected("contraction: initial data live on different grids");
    const ScheduleSettings st = schedule_settings(c);
    const LimitBundle A = run_schedule(EpsilonSchedule{c.eps}, a, s.spec, st);
    const LimitBundle B = run_schedule(EpsilonSchedule{c.eps}, b, s.spec, st);
    for (const LimitBundle* x : {&A, &B})
        if (x->partial) throw SolverFailure("contraction: schedule failed at eps " + fmt17(x->failed_eps) + ": " + x->failure);
    ContractionOutcome o;
    const Trajectory &ta = A.members.back(), &tb = B.members.back();
    for (std::size_t k = 0; k < ta.checkpoints.size(); ++k) {
        o.times.push_back(A.times[k]);
        o.distance.push_back(dist_l2(ta.checkpoints[k].u, tb.checkpoints[k].u));
        if (k > 0) o.worst_increase = std::max(o.worst_increase, o.distance[k] - o.distance[k - 1]);
    }
    o.d0 = o.distance.front();
    o.contracting = o.worst_increase <= c.tol.tol_contract * o.d0;

    const BinSpec bins = bin_spec(c);
    o.i1_min = std::numeric_limits<double>::infinity();
    const std::size_t last = A.times.size() - 1;
    for (std::size_t k = 0; k <= last; ++k) {
        if (k % static_cast<std::size_t>(std::max(1, i1_every)) != 0 && k != last) continue;
        const auto ma = estimate(A, k, bins, estimate_settings(c));
        const auto mb = estimate(B, k, bins, estimate_settings(c));
        auto p = uniqueness_integrand(ma, mb, s.spec, s.oracle);
        if (p.checked) o.i1_min = std::min(o.i1_min, p.min_value);
        o.i1_checked += p.checked;
        if (k == last) o.i1_final = std::move(p.values);
    }
    if (o.i1_checked == 0) o.i1_min = 0.0;
    o.i1_ok = o.i1_min >= -c.tol.tol_i1;
    return o;
}

CompareOutcome run_compare(const RunConfig& c, const Setup& s, const ScalarField& u0) {
    if (!s.admissibility.convex())
        throw Rejected("compare: potential '" + s.spec.id +
                       "' is not convex; equivalence with strong solutions is only claimed when the potential equals its convex envelope");
    if (c.flux_mode() == FluxMode::Relaxed) throw Rejected("compare: use the raw or envelope flux");
    CompareOutcome o;
    o.ym = run_continuation(c, s, u0);
    if (o.ym.bundle.partial) throw SolverFailure("compare: schedule failed: " + o.ym.bundle.failure);
    const ProxSolver P = make_prox(s.spec, c.flux_r_max);
    o.strong = solve_strong(u0, s.spec, c.time(), P);
    o.eq = compare_equivalence(o.ym.bundle, o.ym.measures, o.strong, s.spec, P);
    const ScalarField& uf = o.strong.checkpoints.back().u;
    const VectorField gu = gradient(uf);
    VectorField z(uf.grid);
    for (std::size_t f = 0; f < gu.x.size(); ++f) z.set(f, s.spec.grad(gu.at(f)));
    o.pairing = anzellotti_pair(z, uf);
    return o;
}

int cmd_catalog(const RunConfig& c, const fs::path& root) {
    Manifest m{"catalog", c, root / "catalog"};
    CsvWriter w(m.add("catalog.csv"), config_hash(c), {"id", "test_only", "radial", "lambda", "Lambda", "flux_lip", "convex"});
    std::printf("%-24s %-9s %-7s %-8s %-8s %-8s %s\n", "id", "test_only", "radial", "lambda", "Lambda", "lip", "convex");
    for (const auto& id : catalog_names(true)) {
        const PotentialSpec s = make_potential(id, 1);
        const ConvexEnvelope env = build_envelope(s, 8.0, 801);
        const RecessionTable rec = recession(s, &env);
        const bool convex = check_admissibility(s, env, rec, {}, c.seed).convex();
        w.cell(id).cell(static_cast<long long>(s.test_only)).cell(static_cast<long long>(s.radial)).cell(s.lambda_lo);
        w.cell(s.lambda_hi).cell(s.flux_lip).cell(static_cast<long long>(convex));
        w.end_row();
        std::printf("%-24s %-9d %-7d %-8g %-8g %-8g %d\n", id.c_str(), s.test_only, s.radial, s.lambda_lo, s.lambda_hi,
                    s.flux_lip, convex);
    }
    m.write("ok");
    return 0;
}

int cmd_convexify(const RunConfig& c, const fs::path& root) {
    Manifest m{"convexify", c, root / "convexify"};
    const std::string hash = config_hash(c);
    const Setup s = prepare(c);
    {
        CsvWriter w(m.add("envelope.csv"), hash, {"x", "y", "phi", "env", "p_x", "p_y", "coincident"});
        for (std::size_t k = 0; k < s.env.size(); ++k) {
            const Vec2 A = s.env.point(k);
            w.cell(A[0]).cell(A[1]).cell(s.env.phi[k]).cell(s.env.env[k]).cell(s.env.grad[k][0]).cell(s.env.grad[k][1]);
            w.cell(static_cast<long long>(s.env.coincidence[k]));
            w.end_row();
        }
    }
    {
        CsvWriter w(m.add("contacts.csv"), hash, {"source", "a", "b", "slope"});
        for (const auto& [a, b] : s.env.contact_points) {
            w.cell(std::string("samples")).cell(a).cell(b).cell(std::numeric_limits<double>::quiet_NaN());
            w.end_row();
        }
        if (s.hull)
            for (std::size_t k = 0; k < s.hull->intervals.size(); ++k) {
                w.cell(std::string("radial")).cell(s.hull->intervals[k].first).cell(s.hull->intervals[k].second);
                w.cell(s.hull->slopes[k]);
                w.end_row();
            }
    }
    write_json(m.add("admissibility.json"), admissibility_json(s.admissibility));
    std::printf("%s: structure %s, convex %s, coincidence %s\n", s.spec.id.c_str(), s.admissibility.structure_ok() ? "ok" : "FAIL",
                s.admissibility.convex() ? "yes" : "no",
                std::all_of(s.env.coincidence.begin(), s.env.coincidence.end(), [](auto v) { return v != 0; }) ? "everywhere"
                                                                                                                : "partial");
    if (s.hull)
        for (std::size_t k = 0; k < s.hull->intervals.size(); ++k)
            std::printf("  flat piece |A| in (%.10g, %.10g), slope %.10g\n", s.hull->intervals[k].first,
                        s.hull->intervals[k].second, s.hull->slopes[k]);
    m.write("ok");
    return 0;
}

int cmd_continuation(const RunConfig& c, const fs::path& root, bool override_admissibility) {
    Manifest m{"continuation", c, root / "continuation"};
    const std::string hash = config_hash(c);
    const Setup s = prepare(c);
    write_json(m.add("admissibility.json"), admissibility_json(s.admissibility));
    const auto bad = failing_entries(s.admissibility);
    m.extra["admissibility_override"] = override_admissibility;
    m.extra["admissibility_failures"] = bad;
    if (!bad.empty() && !override_admissibility) {
        std::string msg = "continuation: potential '" + s.spec.id + "' fails";
        for (const auto& b : bad) msg += " " + b;
        m.write("rejected");
        throw Rejected(msg + " (pass --override-admissibility to run anyway)");
    }
    const ScalarField u0 = make_initial(c.grid(), c.initial);
    const ContinuationOutcome o = run_continuation(c, s, u0);
    const LimitBundle& b = o.bundle;
    {
        CsvWriter w(m.add("norms.csv"), hash, {"eps", "t", "linf", "w11", "l2", "ut_l2_cum", "sqrt_eps_h1", "energy", "visc_cum"});
        for (const auto& tr : b.members)
            for (const auto& n : tr.norms) {
                w.cell(tr.eps).cell(n.t).cell(n.linf).cell(n.w11).cell(n.l2).cell(n.ut_l2_cum).cell(n.sqrt_eps_h1);
                w.cell(n.energy).cell(n.visc_cum);
                w.end_row();
            }
    }
    {
        CsvWriter w(m.add("schedule.csv"), hash,
                    {"eps", "cauchy_next", "visc_decay", "dt_inner", "substeps", "max_energy_increase", "max_linf_excess"});
        for (std::size_t k = 0; k < b.members.size(); ++k) {
            const auto& tr = b.members[k];
            w.cell(tr.eps).cell(k < b.cauchy.size() ? b.cauchy[k] : std::numeric_limits<double>::quiet_NaN());
            w.cell(b.visc_decay[k]).cell(tr.dt_inner).cell(static_cast<long long>(tr.substeps)).cell(tr.max_energy_increase);
            w.cell(tr.max_linf_excess);
            w.end_row();
        }
    }
    if (!b.u_limit.empty()) {
        std::vector<const ScalarField*> f;
        for (const auto& u : b.u_limit) f.push_back(&u);
        write_field(m.add("u_limit.csv"), hash, f);
    }
    if (!o.reports.empty()) {
        CsvWriter w(m.add("structural.csv"), hash,
                    {"t", "support_violation_mass", "independence_l1", "independence_max", "jf_residual_min", "jf_equality_gap",
                     "jf_residual_min_rel", "jf_equality_gap_rel", "barycenter_interior", "barycenter_boundary", "jensen_worst",
                     "lambda_interior", "lambda_boundary", "r_cut"});
        for (std::size_t k = 0; k < o.reports.size(); ++k) {
            const auto& r = o.reports[k];
            const auto& me = o.measures[k];
            w.cell(b.times[k]).cell(r.support_violation_mass).cell(r.independence_l1).cell(r.independence_max);
            w.cell(r.jf_residual_min).cell(r.jf_equality_gap).cell(r.jf_residual_min_rel).cell(r.jf_equality_gap_rel);
            w.cell(r.barycenter_interior).cell(r.barycenter_boundary).cell(r.jensen_worst);
            w.cell(me.lambda_interior()).cell(me.lambda_boundary()).cell(me.r_cut);
            w.end_row();
        }
        write_measure(m.add("measure_final.csv"), hash, o.measures.back());
    }
    if (o.weak) {
        CsvWriter w(m.add("weak_form.csv"), hash, {"t", "phi", "residual"});
        for (std::size_t k = 0; k < o.weak->times.size(); ++k)
            for (std::size_t p = 0; p < o.weak->residual[k].size(); ++p) {
                w.cell(o.weak->times[k]).cell(static_cast<long long>(p)).cell(o.weak->residual[k][p]);
                w.end_row();
            }
    }
    json summary = {{"potential", s.spec.id}, {"flux", to_string(b.mode)}, {"eps", b.eps}, {"partial", b.partial},
                    {"cauchy", b.cauchy}, {"visc_decay", b.visc_decay}, {"laminated_sites", o.laminated_sites}};
    if (!o.reports.empty()) {
        summary["structural_worst"] = structural_json(o.worst);
        for (const SubCheck& k : structural_checks(c, s, o))
            summary["checks"].push_back({{"name", k.name}, {"pass", k.pass}, {"measured", k.measured}, {"budget", k.budget}});
    }
    if (o.weak) summary["weak_form_max"] = o.weak->max_residual;
    if (o.bounds) {
        const auto& br = *o.bounds;
        summary["bounds"] = {{"budget", br.budget}, {"passed", br.passed()}, {"sups", br.sups},
                             {"visc_final_over_first", br.visc_final_over_first},
                             {"sqrt_eps_h1_final_over_first", br.sqrt_eps_h1_final_over_first}};
    }
    if (b.partial) {
        summary["failed_eps"] = b.failed_eps;
        summary["failure"] = b.failure;
        std::ofstream(m.dir / "FAILED") << "eps " << fmt17(b.failed_eps) << ": " << b.failure << "\n";
        m.artifacts.push_back("FAILED");
    }
    write_json(m.add("summary.json"), summary);
    m.write(b.partial ? "partial" : "ok");
    std::printf("continuation %s: %zu members, %zu checkpoints%s\n", s.spec.id.c_str(), b.members.size(), b.times.size(),
                b.partial ? " (PARTIAL)" : "");
    if (!o.reports.empty())
        std::printf("  support %.3g  independence %.3g  jf min(rel) %.3g  jf gap(rel) %.3g  jensen %.3g  laminated %zu\n",
                    o.worst.support_violation_mass, o.worst.independence_l1, o.worst.jf_residual_min_rel,
                    o.worst.jf_equality_gap_rel, o.worst.jensen_worst, o.laminated_sites);
    bool pass = true;
    if (!o.reports.empty())
        for (const SubCheck& k : structural_checks(c, s, o)) {
            pass = pass && k.pass;
            if (!k.pass) std::printf("  check %s failed: %.6g against %.6g\n", k.name.c_str(), k.measured, k.budget);
        }
    return b.partial ? 3 : (pass ? 0 : 1);
}

int cmd_contraction(const RunConfig& c, const fs::path& root) {
    Manifest m{"contraction", c, root / "contraction"};
    const std::string hash = config_hash(c);
    const Setup s = prepare(c);
    const Grid g = c.grid();
    const ContractionOutcome o = run_contraction(c, s, make_initial(g, c.initial), make_initial(g, c.initial_b));
    {
        CsvWriter w(m.add("contraction.csv"), hash, {"t", "distance"});
        for (std::size_t k = 0; k < o.times.size(); ++k) {
            w.cell(o.times[k]).cell(o.distance[k]);
            w.end_row();
        }
    }
    {
        CsvWriter w(m.add("i1.csv"), hash, {"face", "i1"});
        for (const auto& [f, v] : o.i1_final) {
            w.cell(static_cast<long long>(f)).cell(v);
            w.end_row();
        }
    }
    const bool pass = o.contracting && o.i1_ok;
    write_json(m.add("summary.json"), {{"d0", o.d0}, {"worst_increase", o.worst_increase},
                                       {"tolerance", c.tol.tol_contract * o.d0}, {"contracting", o.contracting},
                                       {"i1_min", o.i1_min}, {"i1_checked", o.i1_checked}, {"i1_ok", o.i1_ok}, {"pass", pass}});
    m.write(pass ? "ok" : "failed");
    std::printf("contraction %s: d0 %.6g, final %.6g, worst increase %.3g, I1 min %.3g on %zu faces: %s\n", s.spec.id.c_str(),
                o.d0, o.distance.back(), o.worst_increase, o.i1_min, o.i1_checked, pass ? "PASS" : "FAIL");
    return pass ? 0 : 1;
}

int cmd_compare(const RunConfig& c, const fs::path& root) {
    Manifest m{"compare", c, root / "compare"};
    const std::string hash = config_hash(c);
    const Setup s = prepare(c);
    const CompareOutcome o = run_compare(c, s, make_initial(c.grid(), c.initial));
    {
        CsvWriter w(m.add("equivalence.csv"), hash, {"t", "l2_distance", "flux_agreement", "singular_identity"});
        for (std::size_t k = 0; k < o.eq.times.size(); ++k) {
            w.cell(o.eq.times[k]).cell(o.eq.l2_distance[k]).cell(o.eq.flux_agreement[k]).cell(o.eq.singular_identity[k]);
            w.end_row();
        }
    }
    {
        CsvWriter w(m.add("certificates.csv"), hash, {"t", "d51", "d52", "d53", "singular_mass", "singular_faces"});
        for (const auto& ct : o.strong.certificates) {
            w.cell(ct.t).cell(ct.d51_residual).cell(ct.d52_residual).cell(ct.d53_residual).cell(ct.singular_mass);
            w.cell(static_cast<long long>(ct.singular_faces));
            w.end_row();
        }
    }
    {
        CsvWriter w(m.add("pairing.csv"), hash, {"cell", "x", "y", "density"});
        const Grid& g = o.strong.checkpoints.back().u.grid;
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) {
                const Vec2 x = g.node(i, j);
                w.cell(static_cast<long long>(g.cell(i, j))).cell(x[0]).cell(x[1]).cell(o.pairing.pairing_density[g.cell(i, j)]);
                w.end_row();
            }
    }
    {
        CsvWriter w(m.add("strong_energy.csv"), hash, {"step", "t", "energy"});
        for (std::size_t k = 0; k < o.strong.energy.size(); ++k) {
            w.cell(static_cast<long long>(k)).cell(static_cast<double>(k) * o.strong.dt).cell(o.strong.energy[k]);
            w.end_row();
        }
    }
    write_json(m.add("summary.json"),
               {{"max_l2", o.eq.max_l2}, {"max_flux", o.eq.max_flux}, {"max_singular", o.eq.max_singular},
                {"green_residual", o.pairing.green_residual}, {"pair_class", o.pairing.pair_class},
                {"trace_excess", o.pairing.trace_excess}, {"box_excess", o.pairing.box_excess},
                {"max_energy_increase", o.strong.max_energy_increase}, {"max_prox_iterations", o.strong.max_iterations}});
    m.write("ok");
    std::printf("compare %s: max L2 %.6g, flux %.6g, singular %.3g, green %.3g\n", s.spec.id.c_str(), o.eq.max_l2,
                o.eq.max_flux, o.eq.max_singular, o.pairing.green_residual);
    return 0;
}

int cmd_verify(const RunConfig& c, const fs::path& root, const std::vector<int>& only) {
    const fs::path dir = root / "verify";
    const SuiteSettings st = suite_settings(c);
    const SuiteResult r = run_suite(st, dir, only);
    write_suite(r, st, dir);
    for (const auto& cr : r.criteria) std::printf("%s\n", summary_line(cr).c_str());
    std::printf("verify: %s\n", r.passed() ? "PASS" : "FAIL");
    return r.passed() ? 0 : 1;
}

}  // namespace ymflow
