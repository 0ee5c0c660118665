#include "ymflow/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <optional>

#include "ymflow/young_measure.hpp"

namespace ymflow {

EpsilonSchedule EpsilonSchedule::geometric(double first, int count, double ratio) {
    EpsilonSchedule s;
    double e = first;
    for (int k = 0; k < count; ++k, e *= ratio) s.eps.push_back(e);
    return s;
}

void EpsilonSchedule::validate() const {
    if (eps.size() < 3) throw Rejected("schedule: need at least three epsilon values");
    for (std::size_t k = 0; k < eps.size(); ++k) {
        if (!(eps[k] > 0.0) || !std::isfinite(eps[k])) throw Rejected("schedule: epsilon must be positive");
        if (k > 0 && !(eps[k] < eps[k - 1])) throw Rejected("schedule: epsilon values must strictly decrease");
    }
    if (eps.back() < eps_floor) throw Rejected("schedule: smallest epsilon " + fmt17(eps.back()) + " is below the floor " + fmt17(eps_floor));
}

namespace {
// trapezoid weights on the checkpoint times
std::vector<double> time_weights(const std::vector<double>& t) {
    std::vector<double> w(t.size(), 0.0);
    for (std::size_t k = 1; k < t.size(); ++k) {
        const double d = 0.5 * (t[k] - t[k - 1]);
        w[k - 1] += d;
        w[k] += d;
    }
    return w;
}
}  // namespace

LimitBundle run_schedule(const EpsilonSchedule& schedule, const ScalarField& u0, const PotentialSpec& spec,
                         const ScheduleSettings& st) {
    schedule.validate();
    u0.grid.validate();
    st.time.validate();
    if (st.K < 2) throw Rejected("schedule: K must be at least 2");
    if (u0.grid.dim != spec.dim) throw Rejected("schedule: potential dimension does not match the grid");

    const std::size_t n = schedule.eps.size();
    std::vector<std::optional<MollifiedInitialData>> data(n);
    std::vector<std::optional<FluxModel>> flux(n);
    std::vector<std::optional<Trajectory>> traj(n);
    std::vector<std::string> err(n);

#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, st.jobs))
    for (long k = 0; k < static_cast<long>(n); ++k) {
        try {
            const double e = schedule.eps[k];
            data[k] = mollify_initial(u0, e, st.mollifier_scale);
            flux[k] = make_flux(spec, st.mode, e, st.r_max, st.hull_samples);
            traj[k] = solve(*data[k], *flux[k], st.time, st.solver);
        } catch (const std::exception& ex) {
            err[k] = ex.what();
        }
    }

    LimitBundle b;
    b.grid = u0.grid;
    b.potential = spec.id;
    b.mode = st.mode;
    for (std::size_t k = 0; k < n; ++k) {
        if (!traj[k]) {
            b.partial = true;
            b.failed_eps = schedule.eps[k];
            b.failure = err[k];
            break;
        }
        b.eps.push_back(schedule.eps[k]);
        b.data.push_back(std::move(*data[k]));
        b.flux.push_back(std::move(*flux[k]));
        b.members.push_back(std::move(*traj[k]));
    }
    if (b.members.empty()) return b;

    const Trajectory& fin = b.members.back();
    for (const auto& c : fin.checkpoints) {
        b.times.push_back(c.u.t);
        b.u_limit.push_back(c.u);
    }
    const auto w = time_weights(b.times);
    for (std::size_t k = 0; k + 1 < b.members.size(); ++k) {
        double s = 0.0;
        for (std::size_t c = 0; c < b.times.size(); ++c) {
            const double d = dist_l2(b.members[k].checkpoints[c].u, b.members[k + 1].checkpoints[c].u);
            s += w[c] * d * d;
        }
        b.cauchy.push_back(std::sqrt(s));
    }
    for (const auto& m : b.members) b.visc_decay.push_back(m.norms.back().visc_cum);

    const std::size_t K = std::min<std::size_t>(static_cast<std::size_t>(st.K), b.members.size());
    for (std::size_t k = b.members.size() - K; k < b.members.size(); ++k) {
        b.stack.push_back(k);
        std::vector<VectorField> gs;
        for (const auto& c : b.members[k].checkpoints) gs.push_back(gradient(c.u));
        b.gradient_stack.push_back(std::move(gs));
    }
    return b;
}

std::vector<ScalarField> sine_dictionary(const Grid& g, int modes) {
    std::vector<ScalarField> out;
    const int my = g.dim == 2 ? modes : 1;
    for (int ky = 1; ky <= my; ++ky)
        for (int kx = 1; kx <= modes; ++kx) {
            ScalarField phi(g);
            for (int j = 0; j < g.ny(); ++j)
                for (int i = 0; i < g.nx(); ++i) {
                    const Vec2 x = g.node(i, j);
                    double v = std::sin(kx * M_PI * x[0] / g.extent[0]);
                    if (g.dim == 2) v *= std::sin(ky * M_PI * x[1] / g.extent[1]);
                    phi.v[g.cell(i, j)] = v;
                }
            out.push_back(std::move(phi));
        }
    return out;
}

double c1_norm(const ScalarField& phi) {
    const VectorField g = gradient(phi);
    double a = 0.0, b = 0.0;
    for (double v : phi.v) a = std::max(a, std::abs(v));
    for (std::size_t f = 0; f < g.x.size(); ++f) b = std::max(b, norm(g.at(f)));
    return a + b;
}

double weak_residual(const ScalarField& ut, const VectorField& flux, const ScalarField& phi) {
    const double w = ut.grid.cell_volume();
    const VectorField g = gradient(phi);
    double s = 0.0;
    for (std::size_t k = 0; k < ut.v.size(); ++k) s += ut.v[k] * phi.v[k] * w;
    for (std::size_t f = 0; f < g.x.size(); ++f) s += dot(flux.at(f), g.at(f)) * w;
    return std::abs(s);
}

WeakFormResidual weak_form_residual(const LimitBundle& b, const std::vector<GeneralizedYoungMeasure>& measures,
                                    const PotentialSpec& spec, int modes) {
    if (b.members.empty()) throw Rejected("weak form: empty bundle");
    if (measures.size() != b.times.size()) throw Rejected("weak form: missing Young measure for some checkpoint");
    WeakFormResidual r;
    r.modes = modes;
    r.times = b.times;
    const auto dict = sine_dictionary(b.grid, modes);
    std::vector<double> cn;
    for (const auto& phi : dict) cn.push_back(c1_norm(phi));
    const Trajectory& fin = b.members.back();
    for (std::size_t c = 0; c < b.times.size(); ++c) {
        const VectorField z = flux_field(measures[c], spec);
        std::vector<double> row;
        for (std::size_t k = 0; k < dict.size(); ++k) {
            row.push_back(weak_residual(fin.checkpoints[c].ut, z, dict[k]) / cn[k]);
            r.max_residual = std::max(r.max_residual, row.back());
        }
        r.residual.push_back(std::move(row));
    }
    return r;
}

}  // namespace ymflow
