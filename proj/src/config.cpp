#include "ymflow/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <type_traits>

#include "ymflow/continuation.hpp"

namespace ymflow {

using nlohmann::json;

namespace {

// Reads fields of one object, remembering which keys were consumed so the
// leftovers can be reported.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw Rejected("config: '" + path_ + "' must be an object");
    }
    ~Section() noexcept(false) {
        if (std::uncaught_exceptions()) return;
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw Rejected("config: unknown key '" + path_ + "." + it.key() + "'");
    }
    const json* get(const std::string& k) {
        seen_.insert(k);
        auto it = j_.find(k);
        return it == j_.end() ? nullptr : &*it;
    }
    std::string where(const std::string& k) const { return path_ + "." + k; }

    void num(const std::string& k, double& out) {
        if (auto* v = get(k)) {
            if (!v->is_number()) throw Rejected("config: '" + where(k) + "' must be a number");
            out = v->get<double>();
        }
    }
    void integer(const std::string& k, int& out) {
        if (auto* v = get(k)) {
            if (!v->is_number_integer()) throw Rejected("config: '" + where(k) + "' must be an integer");
            out = v->get<int>();
        }
    }
    void str(const std::string& k, std::string& out) {
        if (auto* v = get(k)) {
            if (!v->is_string()) throw Rejected("config: '" + where(k) + "' must be a string");
            out = v->get<std::string>();
        }
    }
    template <class T>
    void list(const std::string& k, std::vector<T>& out) {
        if (auto* v = get(k)) {
            if (!v->is_array()) throw Rejected("config: '" + where(k) + "' must be an array");
            out.clear();
            for (const auto& e : *v) {
                if (!e.is_number() || (std::is_integral_v<T> && !e.is_number_integer()))
                    throw Rejected("config: '" + where(k) + "' has a non-numeric entry");
                out.push_back(e.get<T>());
            }
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

json initial_json(const InitialSpec& s) {
    return {{"kind", s.kind}, {"amplitude", s.amplitude}, {"mode", s.mode}, {"center", s.center}, {"width", s.width}};
}

void read_initial(const json& j, const std::string& path, InitialSpec& s) {
    Section r(j, path);
    r.str("kind", s.kind);
    r.num("amplitude", s.amplitude);
    r.integer("mode", s.mode);
    r.num("center", s.center);
    r.num("width", s.width);
}

void check_initial(const InitialSpec& s, const std::string& path) {
    static const std::set<std::string> kinds{"zero", "sin", "tent", "step", "bump"};
    if (!kinds.count(s.kind)) throw Rejected("config: " + path + ".kind '" + s.kind + "' is not one of zero|sin|tent|step|bump");
    if (!std::isfinite(s.amplitude)) throw Rejected("config: " + path + ".amplitude must be finite");
    if (s.mode < 1) throw Rejected("config: " + path + ".mode must be >= 1");
    if (!(s.width > 0.0 && s.width < 1.0)) throw Rejected("config: " + path + ".width must lie in (0,1)");
    if (!(s.center > 0.0 && s.center < 1.0)) throw Rejected("config: " + path + ".center must lie in (0,1)");
}

}  // namespace

void RunConfig::validate() const {
    if (dim != 1 && dim != 2) throw Rejected("config: grid.dim must be 1 or 2");
    if (static_cast<int>(cells.size()) != dim || static_cast<int>(extent.size()) != dim)
        throw Rejected("config: grid.cells and grid.extent need one entry per dimension");
    grid().validate();
    time().validate();
    if (eps.empty()) throw Rejected("config: schedule.eps is empty");
    EpsilonSchedule{eps}.validate();
    flux_mode();
    if (!(mollifier_scale > 0.0)) throw Rejected("config: schedule.mollifier_scale must be positive");
    if (members < 2) throw Rejected("config: schedule.members must be at least 2");
    check_initial(initial, "initial");
    check_initial(initial_b, "initial_b");
    if (per_axis < 2 || sphere_bins < 2 || !(r_hist > 0.0)) throw Rejected("config: histogram settings must be positive");
    if (window < 1 || window % 2 == 0) throw Rejected("config: histogram.window must be a positive odd integer");
    if (!(cutoff_quantile > 0.0 && cutoff_quantile <= 1.0)) throw Rejected("config: histogram.cutoff_quantile must lie in (0,1]");
    if (!(envelope_r_max > 0.0) || envelope_samples < 5 || !(flux_r_max > 0.0) || hull_samples < 5)
        throw Rejected("config: envelope settings out of range");
    if (dim == 2 && envelope_samples > 257) throw Rejected("config: envelope.samples must be <= 257 in 2D");
    if (weak_modes < 1) throw Rejected("config: diagnostics.weak_modes must be >= 1");
    for (double t : {tol.tol_coinc, tol.tol_conv, tol.tol_rec, tol.tol_jf, tol.tol_contract, tol.tol_i1, tol.tol_jensen,
                     tol.support_mass, tol.C_M})
        if (!(t > 0.0) || !std::isfinite(t)) throw Rejected("config: all tolerances must be positive and finite");
    if (!(tol.tol_uniform >= 1.0)) throw Rejected("config: tolerances.tol_uniform must be >= 1");
    if (jobs < 1) throw Rejected("config: jobs must be >= 1");
    if (output.empty()) throw Rejected("config: output must not be empty");
}

Grid RunConfig::grid() const {
    if (dim == 1) return Grid::line(cells.at(0), extent.at(0));
    Grid g;
    g.dim = 2;
    g.cells = {cells.at(0), cells.at(1)};
    g.extent = {extent.at(0), extent.at(1)};
    return g;
}

json to_json(const RunConfig& c) {
    json j;
    j["potential"] = {{"id", c.potential}, {"params", c.potential_params}};
    j["grid"] = {{"dim", c.dim}, {"cells", c.cells}, {"extent", c.extent}};
    j["time"] = {{"T", c.T}, {"dt", c.dt}, {"stride", c.stride}};
    j["schedule"] = {{"eps", c.eps}, {"flux", c.flux}, {"mollifier_scale", c.mollifier_scale}, {"members", c.members}};
    j["initial"] = initial_json(c.initial);
    j["initial_b"] = initial_json(c.initial_b);
    j["histogram"] = {{"per_axis", c.per_axis}, {"r_hist", c.r_hist}, {"sphere_bins", c.sphere_bins},
                      {"window", c.window}, {"cutoff_quantile", c.cutoff_quantile}};
    j["envelope"] = {{"r_max", c.envelope_r_max}, {"samples", c.envelope_samples}, {"flux_r_max", c.flux_r_max},
                     {"hull_samples", c.hull_samples}};
    j["diagnostics"] = {{"weak_modes", c.weak_modes}};
    const Tolerances& t = c.tol;
    j["tolerances"] = {{"tol_coinc", t.tol_coinc},       {"tol_conv", t.tol_conv},     {"tol_rec", t.tol_rec},
                       {"tol_jf", t.tol_jf},             {"tol_uniform", t.tol_uniform}, {"tol_contract", t.tol_contract},
                       {"tol_i1", t.tol_i1},             {"tol_jensen", t.tol_jensen}, {"support_mass", t.support_mass},
                       {"C_M", t.C_M}};
    j["output"] = c.output;
    j["seed"] = c.seed;
    j["jobs"] = c.jobs;
    return j;
}

RunConfig config_from_json(const json& j) {
    RunConfig c;
    {
        Section top(j, "config");
        if (auto* p = top.get("potential")) {
            Section s(*p, "potential");
            s.str("id", c.potential);
            if (auto* pr = s.get("params")) {
                if (!pr->is_object()) throw Rejected("config: 'potential.params' must be an object");
                c.potential_params.clear();
                for (auto it = pr->begin(); it != pr->end(); ++it) {
                    if (!it->is_number()) throw Rejected("config: potential parameter '" + it.key() + "' must be a number");
                    c.potential_params[it.key()] = it->get<double>();
                }
            }
        }
        if (auto* p = top.get("grid")) {
            Section s(*p, "grid");
            s.integer("dim", c.dim);
            s.list("cells", c.cells);
            s.list("extent", c.extent);
        }
        if (auto* p = top.get("time")) {
            Section s(*p, "time");
            s.num("T", c.T);
            s.num("dt", c.dt);
            s.integer("stride", c.stride);
        }
        if (auto* p = top.get("schedule")) {
            Section s(*p, "schedule");
            s.list("eps", c.eps);
            s.str("flux", c.flux);
            s.num("mollifier_scale", c.mollifier_scale);
            s.integer("members", c.members);
        }
        if (auto* p = top.get("initial")) read_initial(*p, "initial", c.initial);
        if (auto* p = top.get("initial_b")) read_initial(*p, "initial_b", c.initial_b);
        if (auto* p = top.get("histogram")) {
            Section s(*p, "histogram");
            s.integer("per_axis", c.per_axis);
            s.num("r_hist", c.r_hist);
            s.integer("sphere_bins", c.sphere_bins);
            s.integer("window", c.window);
            s.num("cutoff_quantile", c.cutoff_quantile);
        }
        if (auto* p = top.get("envelope")) {
            Section s(*p, "envelope");
            s.num("r_max", c.envelope_r_max);
            s.integer("samples", c.envelope_samples);
            s.num("flux_r_max", c.flux_r_max);
            s.integer("hull_samples", c.hull_samples);
        }
        if (auto* p = top.get("diagnostics")) {
            Section s(*p, "diagnostics");
            s.integer("weak_modes", c.weak_modes);
        }
        if (auto* p = top.get("tolerances")) {
            Section s(*p, "tolerances");
            Tolerances& t = c.tol;
            s.num("tol_coinc", t.tol_coinc);
            s.num("tol_conv", t.tol_conv);
            s.num("tol_rec", t.tol_rec);
            s.num("tol_jf", t.tol_jf);
            s.num("tol_uniform", t.tol_uniform);
            s.num("tol_contract", t.tol_contract);
            s.num("tol_i1", t.tol_i1);
            s.num("tol_jensen", t.tol_jensen);
            s.num("support_mass", t.support_mass);
            s.num("C_M", t.C_M);
        }
        top.str("output", c.output);
        if (auto* v = top.get("seed")) {
            if (!v->is_number_unsigned()) throw Rejected("config: 'config.seed' must be a non-negative integer");
            c.seed = v->get<std::uint64_t>();
        }
        top.integer("jobs", c.jobs);
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Rejected("config: cannot open '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Rejected("config: " + path + ": " + e.what());
    }
    return config_from_json(j);
}

// jobs and output do not change any result, so they stay out of the hash
std::string canonical(const RunConfig& c) {
    json j = to_json(c);
    j.erase("jobs");
    j.erase("output");
    return j.dump();
}

std::string config_hash(const RunConfig& c) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : canonical(c)) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {
double profile(const InitialSpec& s, double x, double L) {
    const double r = x / L;
    if (s.kind == "zero") return 0.0;
    if (s.kind == "sin") return std::sin(s.mode * M_PI * r);
    if (s.kind == "tent") return L * std::min(r, 1.0 - r);
    if (s.kind == "step") return std::abs(r - s.center) < s.width ? 1.0 : 0.0;
    const double d = (r - s.center) / s.width;
    return std::exp(-0.5 * d * d);
}
}  // namespace

ScalarField make_initial(const Grid& g, const InitialSpec& s) {
    check_initial(s, "initial");
    ScalarField u(g);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            const Vec2 x = g.node(i, j);
            double v = profile(s, x[0], g.extent[0]);
            if (g.dim == 2)
                v = s.kind == "tent" ? std::min(v, profile(s, x[1], g.extent[1])) : v * profile(s, x[1], g.extent[1]);
            u.v[g.cell(i, j)] = s.amplitude * v;
        }
    return u;
}

}  // namespace ymflow
