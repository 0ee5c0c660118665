#pragma once

#include <string>
#include <vector>

#include "ymflow/mesh.hpp"
#include "ymflow/potential.hpp"
#include "ymflow/regularized_solver.hpp"

namespace ymflow {

struct GeneralizedYoungMeasure;

struct EpsilonSchedule {
    std::vector<double> eps;
    static constexpr double eps_floor = 1e-4;
    static EpsilonSchedule geometric(double first, int count, double ratio = 0.5);
    void validate() const;
};

struct ScheduleSettings {
    FluxMode mode = FluxMode::Raw;
    TimeGrid time;
    double mollifier_scale = 1.0;  // δ = scale √ε
    double r_max = 32.0;           // envelope box for envelope/relaxed fluxes
    int hull_samples = 4001;
    int K = 3;
    int jobs = 1;
    SolverSettings solver;
};

struct LimitBundle {
    Grid grid;
    std::string potential;
    FluxMode mode = FluxMode::Raw;
    std::vector<double> eps;
    std::vector<MollifiedInitialData> data;
    std::vector<FluxModel> flux;
    std::vector<Trajectory> members;
    std::vector<double> times;
    std::vector<ScalarField> u_limit;  // finest member at each checkpoint
    std::vector<double> cauchy;        // ‖u^{ε_n} - u^{ε_{n+1}}‖_{L²(Ω_T)}
    std::vector<double> visc_decay;    // ε_n ‖∇u^{ε_n}‖²_{L²(Ω_T)}
    std::vector<std::size_t> stack;    // member indices of the retained gradient stacks
    std::vector<std::vector<VectorField>> gradient_stack;  // [stack member][checkpoint]
    bool partial = false;
    double failed_eps = 0.0;
    std::string failure;

    std::size_t finest() const { return members.size() - 1; }
};

LimitBundle run_schedule(const EpsilonSchedule& schedule, const ScalarField& u0, const PotentialSpec& spec,
                         const ScheduleSettings& settings);

struct WeakFormResidual {
    int modes = 8;
    std::vector<double> times;
    // [checkpoint][test function] = |∫u_t φ + ∫⟨ν,q⟩·∇φ| / ‖φ‖_{C¹}
    std::vector<std::vector<double>> residual;
    double max_residual = 0.0;
};

// Tensor sine dictionary Π sin(k_a π x_a / L_a), k_a = 1..modes, at the nodes.
std::vector<ScalarField> sine_dictionary(const Grid& g, int modes);
double c1_norm(const ScalarField& phi);
// residual of a single checkpoint for a given face flux
double weak_residual(const ScalarField& ut, const VectorField& flux, const ScalarField& phi);
WeakFormResidual weak_form_residual(const LimitBundle& b, const std::vector<GeneralizedYoungMeasure>& measures,
                                    const PotentialSpec& spec, int modes = 8);

}  // namespace ymflow
