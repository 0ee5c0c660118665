#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ymflow/mesh.hpp"
#include "ymflow/potential.hpp"

namespace ymflow {

enum class FluxMode { Raw, Envelope, Relaxed };
std::string to_string(FluxMode m);
FluxMode flux_mode_from_string(const std::string& s);

struct Atom {
    Vec2 loc{0.0, 0.0};
    double w = 0.0;
};

// Explicit flux F of the semi-implicit scheme u⁺ - dt ε Δu⁺ = u + dt div F(∇u).
//   Raw:      F = q                     (the viscous problem as posed)
//   Envelope: F = p = ∇Φ**
//   Relaxed:  F = p_ε - ε I, p_ε = ∇(Φ + ε/2|·|²)**; the scheme then solves
//             u_t = div p_ε(∇u), whose gradient Young measure is the laminate
//             returned by atoms().
struct FluxModel {
    PotentialSpec spec;
    FluxMode mode = FluxMode::Raw;
    double eps = 0.0;
    std::optional<RadialHull> hull;

    Vec2 flux(const Vec2& A) const;
    double energy_density(const Vec2& A) const;
    // ε-level Young measure at a face gradient: one or two atoms, barycentre A
    int atoms(const Vec2& A, Atom out[2]) const;
    double lip() const;         // Lipschitz bound of F (and of F(A)·A/|A|²)
    double flux_bound() const;  // sup |F| used by the CFL bound
};
FluxModel make_flux(const PotentialSpec& spec, FluxMode mode, double eps, double r_max = 0.0, int hull_samples = 4001);

struct MollifiedInitialData {
    ScalarField u0_eps;
    double eps = 0.0;
    double width = 0.0;
    double bv = 0.0, l2_diff = 0.0, linf = 0.0, linf_source = 0.0, sqrt_eps_h1 = 0.0;
};
MollifiedInitialData mollify_initial(const ScalarField& u0, double eps, double width_scale = 1.0);

struct SolverSettings {
    double cg_tol = 1e-10;
    int cg_cap_factor = 10;
};

// Explicit step bound: min(h/(4NΛ), h²/(2N L)), L = Lip(F). The first term is
// the flux CFL; the second keeps the explicit part monotone (maximum
// principle) and energy-decreasing.
double dt_max(const Grid& g, const FluxModel& F);

struct StepWork {
    VectorField grad, flux;
    std::vector<double> rhs, r, p, Ap, wx, wy;
    explicit StepWork(const Grid& g);
};

struct StepStats {
    int cg_iterations = 0;
    double cg_residual = 0.0;
};

// One semi-implicit step. Rejects dt above dt_max.
ScalarField step(const ScalarField& u, const FluxModel& F, double dt, const SolverSettings& s = {},
                 StepWork* work = nullptr, StepStats* stats = nullptr);
// Solves (I - c Δ_h) x = b by CG; returns iterations.
int solve_shifted(const Grid& g, double c, const std::vector<double>& b, std::vector<double>& x, StepWork& w,
                  const SolverSettings& s, double* residual = nullptr);

double energy(const ScalarField& u, const FluxModel& F);

struct NormSample {
    double t = 0.0, linf = 0.0, w11 = 0.0, l2 = 0.0, ut_l2_cum = 0.0, sqrt_eps_h1 = 0.0, energy = 0.0, visc_cum = 0.0;
};

struct Checkpoint {
    ScalarField u;
    ScalarField ut;  // velocity of the step ending here (first step at t = 0)
};

struct Trajectory {
    std::string potential;
    FluxMode mode = FluxMode::Raw;
    double eps = 0.0;
    double dt = 0.0;        // outer step
    double dt_inner = 0.0;  // after substepping to dt_max
    int substeps = 1;
    double dt_max = 0.0;
    double linf0 = 0.0;
    double e0 = 0.0;
    double max_energy_increase = 0.0;  // largest single-step increase
    double max_linf_excess = 0.0;      // sup_t ‖u‖_∞ - ‖u0‖_∞
    double dissipation = 0.0;          // ∫∫ |u_t|²
    int max_cg_iterations = 0;
    std::vector<Checkpoint> checkpoints;
    std::vector<NormSample> norms;
};

Trajectory solve(const MollifiedInitialData& data, const FluxModel& F, const TimeGrid& tg, const SolverSettings& s = {});
Trajectory solve(const ScalarField& u0, double eps, const FluxModel& F, const TimeGrid& tg, const SolverSettings& s = {});

struct BoundsReport {
    double budget = 0.0;
    std::vector<double> eps;
    // per member: sup Linf, sup W11, sup L2, ‖u_t‖_{L²(Ω_T)}, sup √ε‖u‖_H1, ε‖∇u‖²_{L²(Ω_T)}
    std::vector<std::array<double, 6>> sups;
    std::array<bool, 5> bounded{};
    std::array<bool, 4> uniform{};  // ratio test on the four ε-uniform norms
    bool sqrt_eps_h1_nonincreasing = false;
    bool visc_nonincreasing = false;
    double visc_final_over_first = 0.0;
    double sqrt_eps_h1_final_over_first = 0.0;
    bool passed() const;
};

// M = C_M (1 + ‖u0‖_BV + ‖u0‖_∞ + |Ω|) Λ/λ
double bounds_budget(const ScalarField& u0, const PotentialSpec& spec, double C_M);
BoundsReport verify_lemma25(const std::vector<Trajectory>& trajs, double budget, double tol_uniform = 1.1);

}  // namespace ymflow
