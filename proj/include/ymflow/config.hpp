#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ymflow/mesh.hpp"
#include "ymflow/regularized_solver.hpp"

namespace ymflow {

// Initial data; 2D kinds are tensor products of the 1D profile in x and y.
struct InitialSpec {
    std::string kind = "sin";  // zero | sin | tent | step | bump
    double amplitude = 1.0;    // sin, step, bump height; tent slope
    int mode = 1;              // sin
    double center = 0.5;       // bump, step (relative to the extent)
    double width = 0.2;        // bump σ, step half width (relative)
    bool operator==(const InitialSpec&) const = default;
};

struct Tolerances {
    double tol_coinc = 1e-8;
    double tol_conv = 1e-8;
    double tol_rec = 1e-4;
    double tol_jf = 1e-2;         // relative to the local energy scale
    double tol_uniform = 1.1;
    double tol_contract = 1e-6;   // per step, relative to the initial distance
    double tol_i1 = 1e-6;
    double tol_jensen = 1e-8;
    double support_mass = 0.05;
    double C_M = 4.0;
    bool operator==(const Tolerances&) const = default;
};

struct RunConfig {
    std::string potential = "minimal-surface";
    std::map<std::string, double> potential_params;
    int dim = 1;
    std::vector<int> cells{127};
    std::vector<double> extent{1.0};
    double T = 0.25;
    double dt = 2e-4;
    int stride = 125;
    std::vector<double> eps{0.1, 0.05, 0.025};
    std::string flux = "raw";  // raw | envelope | relaxed
    double mollifier_scale = 1.0;
    int members = 3;           // K finest members pooled by the estimator
    InitialSpec initial;
    InitialSpec initial_b{"sin", 0.5, 1, 0.5, 0.2};
    int per_axis = 64;
    double r_hist = 8.0;
    int sphere_bins = 16;
    int window = 1;
    double cutoff_quantile = 0.995;
    double envelope_r_max = 16.0;
    int envelope_samples = 2001;
    double flux_r_max = 32.0;
    int hull_samples = 4001;
    int weak_modes = 8;
    Tolerances tol;
    std::string output = "ymflow_out";
    std::uint64_t seed = 1;
    int jobs = 1;

    bool operator==(const RunConfig&) const = default;

    void validate() const;
    Grid grid() const;
    TimeGrid time() const { return {T, dt, stride}; }
    FluxMode flux_mode() const { return flux_mode_from_string(flux); }
};

nlohmann::json to_json(const RunConfig& c);
RunConfig config_from_json(const nlohmann::json& j);  // validates; unknown keys are errors
RunConfig load_config(const std::string& path);
std::string canonical(const RunConfig& c);   // to_json without jobs and output
std::string config_hash(const RunConfig& c);  // FNV-1a 64 of the canonical dump, hex

ScalarField make_initial(const Grid& g, const InitialSpec& s);

}  // namespace ymflow
