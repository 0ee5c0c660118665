#pragma once

#include <string>
#include <vector>

#include "ymflow/mesh.hpp"
#include "ymflow/potential.hpp"

namespace ymflow {

struct LimitBundle;
struct GeneralizedYoungMeasure;

struct AnzellottiReport {
    std::vector<double> pairing_density;  // per cell, against the nodal hat family
    std::vector<double> normal_trace;     // per boundary site, outward z·n
    double green_residual = 0.0;
    std::string pair_class;               // "b": z bounded, u ∈ BV ∩ L∞
    double z_inf = 0.0;
    double trace_excess = 0.0;            // max(|[z,n]| - ‖z‖∞, 0)
    double box_excess = 0.0;              // max over dyadic boxes of |(z,Du)(V)| - ‖z‖_{∞,V}|Du|(V)
    std::size_t boxes = 0;
};

// (z,Du) tested against nodal hats; boxes are checked down to 2^levels per axis.
AnzellottiReport anzellotti_pair(const VectorField& z, const ScalarField& u, int levels = 4);

struct StrongSolutionCertificate {
    double t = 0.0;
    double d51_residual = 0.0;  // L² of u_t - div z on cells away from singular faces
    double d52_residual = 0.0;  // Σ |z·θ - Φ∞(θ)| |D^s u|(face)
    double d53_residual = 0.0;  // worst boundary violation of the normal trace condition
    double singular_mass = 0.0; // |D^s u|(Ω)
    std::size_t singular_faces = 0;
};

// Proximal map of the radial envelope, warm-startable through the dual field.
struct ProxSolver {
    RadialHull hull;
    RecessionTable rec;
    double lip = 1.0;  // Lipschitz bound of p
    double tol = 1e-9;
    long cap = 100000;
};
ProxSolver make_prox(const PotentialSpec& spec, double r_max = 64.0);

struct ProxStats {
    long iterations = 0;
    double residual = 0.0;
};
// argmin Σ Φ**(∇v) h^N + 1/(2dt) Σ (v-u)² h^N; `dual` holds p(∇u⁺) on exit.
ScalarField prox_step(const ScalarField& u, double dt, const ProxSolver& P, VectorField& dual, ProxStats* stats = nullptr);

struct StrongCheckpoint {
    ScalarField u, ut;
    VectorField z;  // dual field of the step ending here
};
struct StrongTrajectory {
    std::string potential;
    double dt = 0.0;
    std::vector<double> times;
    std::vector<StrongCheckpoint> checkpoints;
    std::vector<StrongSolutionCertificate> certificates;
    std::vector<double> energy;        // per step, starting at t = 0
    double max_energy_increase = 0.0;  // should be <= 0 up to solver tolerance
    long max_iterations = 0;
};
double envelope_energy(const ScalarField& u, const ProxSolver& P);
StrongSolutionCertificate certify(const StrongCheckpoint& c, const PotentialSpec& spec, const ProxSolver& P);
StrongTrajectory solve_strong(const ScalarField& u0, const PotentialSpec& spec, const TimeGrid& tg, const ProxSolver& P);

struct EquivalenceReport {
    std::vector<double> times;
    std::vector<double> l2_distance;
    std::vector<double> flux_agreement;     // L² over smooth faces of ⟨ν,q⟩ - q(∇u_strong)
    std::vector<double> singular_identity;  // Σ |⟨ν,q⟩·θ - Φ∞(θ)| |D^s u|
    double max_l2 = 0.0, max_flux = 0.0, max_singular = 0.0;
};
EquivalenceReport compare_equivalence(const LimitBundle& b, const std::vector<GeneralizedYoungMeasure>& measures,
                                      const StrongTrajectory& strong, const PotentialSpec& spec, const ProxSolver& P);

}  // namespace ymflow
