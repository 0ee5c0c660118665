#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ymflow/mesh.hpp"
#include "ymflow/potential.hpp"
#include "ymflow/regularized_solver.hpp"

namespace ymflow {

struct LimitBundle;

// Uniform gradient bins on [-r_hist, r_hist]^N and angular bins on the sphere.
struct BinSpec {
    int dim = 1;
    int per_axis = 64;
    double r_hist = 8.0;
    int sphere_bins = 16;  // 2D only; 1D has the two directions ±1

    double width() const { return 2.0 * r_hist / per_axis; }
    double radius() const { return 0.5 * width() * (dim == 2 ? std::sqrt(2.0) : 1.0); }
    int count() const { return dim == 1 ? per_axis : per_axis * per_axis; }
    int bin_of(const Vec2& A) const;
    Vec2 center(int b) const;
    int sphere_count() const { return dim == 1 ? 2 : sphere_bins; }
    int sphere_bin_of(const Vec2& dir) const;
    Vec2 sphere_center(int b) const;
};

// One occupied bin: probability mass and the mass-weighted mean of the
// samples that fell into it. Pairings are evaluated at this mean.
struct BinMass {
    int bin = 0;
    double mass = 0.0;
    Vec2 atom{0.0, 0.0};
};
using Histogram = std::vector<BinMass>;

void hist_add(Histogram& h, int bin, double mass, const Vec2& loc);
double hist_total(const Histogram& h);
void hist_normalize(Histogram& h);

// Discrete generalized Young measure. Sites are the faces of the grid (the
// dual cells that tile Ω); the boundary part lives on the boundary sites.
struct GeneralizedYoungMeasure {
    Grid grid;
    BinSpec bins;
    std::vector<Histogram> nu;       // per face, oscillation measure
    std::vector<double> lambda;      // per face, concentration mass
    std::vector<Histogram> nu_inf;   // per face, directions (empty when lambda = 0)
    std::vector<BoundarySite> bsites;
    std::vector<double> trace;       // u^Ω at each boundary site
    std::vector<double> lambda_b;
    std::vector<Histogram> nu_inf_b;
    double r_cut = 0.0;

    void validate() const;  // normalisation and sign invariants
    double lambda_interior() const;
    double lambda_boundary() const;
};

// boundary part from the trace of u: mass |u^Ω| h^{N-1}, direction -sign(u^Ω) n
void attach_boundary(GeneralizedYoungMeasure& m, const ScalarField& u);

// σ_{Du}: Dirac at ∇u on absolutely continuous faces, concentration on the
// singular faces of bv_split.
GeneralizedYoungMeasure elementary(const ScalarField& u, const BVSplit& split, const BinSpec& bins);
// ε-level measure of a relaxed/envelope run: the laminate of FluxModel::atoms
GeneralizedYoungMeasure epsilon_level(const ScalarField& u, const FluxModel& F, const BinSpec& bins);

struct EstimateSettings {
    int window = 1;              // odd; faces within (window-1)/2 per axis are pooled
    double cutoff_quantile = 0.995;
    int members = 3;             // K finest schedule members
};
GeneralizedYoungMeasure estimate(const LimitBundle& b, std::size_t checkpoint, const BinSpec& bins,
                                 const EstimateSettings& s = {});

struct Integrand {
    std::string name;
    std::function<double(const Vec2&)> f;
    std::function<double(const Vec2&)> f_inf;  // positively 1-homogeneous; may be empty
};
double pair(const GeneralizedYoungMeasure& m, const Integrand& g);

// per-site moments
Vec2 mean_I(const Histogram& h);
Vec2 mean_q(const Histogram& h, const PotentialSpec& spec);
double mean_qI(const Histogram& h, const PotentialSpec& spec);
VectorField flux_field(const GeneralizedYoungMeasure& m, const PotentialSpec& spec);  // ⟨ν,q⟩ per face

// Answers "is there a point of {Φ = Φ**} within `radius` of A".
struct CoincidenceOracle {
    std::function<double(const Vec2&)> distance;  // distance to the coincidence set
    static CoincidenceOracle radial(const RadialHull& hull);
    static CoincidenceOracle sampled(const ConvexEnvelope& env);
};

struct StructuralReport {
    double support_violation_mass = 0.0;
    double independence_l1 = 0.0, independence_max = 0.0;
    double jf_residual_min = 0.0, jf_equality_gap = 0.0;          // absolute
    double jf_residual_min_rel = 0.0, jf_equality_gap_rel = 0.0;  // per-site, over local energy scale
    double barycenter_interior = 0.0, barycenter_boundary = 0.0;
    double jensen_worst = 0.0;
    std::string jensen_worst_entry;
};

double check_support(const GeneralizedYoungMeasure& m, const CoincidenceOracle& oracle);
void check_independence(const GeneralizedYoungMeasure& m, const PotentialSpec& spec, double& l1, double& mx);
struct JFResult {
    double min_abs = 0.0, gap_abs = 0.0, min_rel = 0.0, gap_rel = 0.0;
};
JFResult check_jf(const GeneralizedYoungMeasure& m, const PotentialSpec& spec, const RecessionTable& rec);
void check_barycenter(const GeneralizedYoungMeasure& m, const ScalarField& u, double& interior, double& boundary);
std::vector<Integrand> jensen_dictionary(const PotentialSpec& spec, const RadialHull* hull, const RecessionTable& rec);
double check_jensen(const GeneralizedYoungMeasure& m, const std::vector<Integrand>& dict, std::string* worst_entry = nullptr);

StructuralReport structural_report(const GeneralizedYoungMeasure& m, const ScalarField& u, const PotentialSpec& spec,
                                   const RecessionTable& rec, const CoincidenceOracle& oracle, const RadialHull* hull);

// Samples of Tf on the closed unit ball (radial profile along `dirs`).
struct TransformSamples {
    std::vector<double> radius;
    std::vector<std::vector<double>> values;  // [direction][radius]
    double boundary_jump = 0.0, interior_jump = 0.0, score = 0.0;
    double steepness = 0.0;  // largest jump over the mean jump; large when f grows faster than linearly
    bool accepted = false;
};
TransformSamples compactified_transform(const Integrand& g, int dim, int n_radius = 401, int n_dirs = 16);

// Per-face integrand of the uniqueness computation:
// ⟨ν₁,q·I⟩ + ⟨ν₂,q·I⟩ - ⟨ν₂,q⟩·⟨ν₁,I⟩ - ⟨ν₁,q⟩·⟨ν₂,I⟩, evaluated where every atom of
// both measures lies in the coincidence set.
struct UniquenessProbe {
    double min_value = 0.0;
    std::size_t checked = 0, sites = 0;
    std::vector<std::pair<std::size_t, double>> values;  // (face, integrand) on checked faces
};
UniquenessProbe uniqueness_integrand(const GeneralizedYoungMeasure& a, const GeneralizedYoungMeasure& b,
                                     const PotentialSpec& spec, const CoincidenceOracle& oracle);

}  // namespace ymflow
