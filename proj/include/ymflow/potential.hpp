#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ymflow/common.hpp"

namespace ymflow {

// Φ and q = ∇Φ on ℝ^N, N ∈ {1,2}. Radial potentials are given by their
// profile h (Φ(A) = h(|A|)); in 1D "radial" means even.
struct PotentialSpec {
    std::string id;
    int dim = 1;
    bool radial = true;
    std::function<double(double)> profile;     // h(r)
    std::function<double(double)> dprofile;    // h'(r); empty -> centred difference
    std::function<double(const Vec2&)> value;  // non-radial Φ
    std::function<Vec2(const Vec2&)> gradf;    // non-radial q; empty -> centred difference
    double lambda_lo = 1.0;
    double lambda_hi = 1.0;
    // bound on Lip(q) and on sup q(A)·A/|A|²; sets the explicit step size
    double flux_lip = 1.0;
    bool test_only = false;
    std::map<std::string, double> params;

    double eval(const Vec2& A) const;
    Vec2 grad(const Vec2& A) const;
    double h(double r) const { return profile(r); }
    double dh(double r) const;
    double d2h(double r) const;
    // Φ + (eps/2)|A|², used for the relaxed flux; structure bounds no longer hold
    PotentialSpec shifted(double eps) const;
};

std::vector<std::string> catalog_names(bool include_test_only = true);
PotentialSpec make_potential(const std::string& id, int dim = 1, const std::map<std::string, double>& params = {});

struct PotentialTolerances {
    double tol_coinc = 1e-8;   // relative: |Φ-Φ**| <= tol (1+|Φ|)
    double tol_conv = 1e-8;
    double tol_mono = 1e-8;
    double tol_rec = 1e-4;
    double tol_min = 1e-10;
    double tol_struct = 1e-10;
};

struct ConvexEnvelope {
    int dim = 1;
    int n = 0;                 // samples per axis
    double r_max = 0.0;        // box half width
    double r_report = 0.0;     // values trusted for |A|_inf <= r_report
    double spacing = 0.0;
    double slope_bound = 0.0;  // 2D: slope box half width of the transform
    std::vector<Vec2> extra_slopes;  // 2D: slopes tried besides the lattice
    std::vector<double> axis;
    std::vector<double> phi, env;
    std::vector<Vec2> grad;
    std::vector<std::uint8_t> coincidence;
    std::vector<std::pair<double, double>> contact_points;  // 1D
    bool reliable = true;
    std::string note;

    std::size_t index(int i, int j = 0) const { return static_cast<std::size_t>(i) + static_cast<std::size_t>(n) * j; }
    Vec2 point(std::size_t k) const;
    std::size_t size() const { return env.size(); }
    double eval(const Vec2& A) const;   // linear / bilinear interpolation
    Vec2 slope(const Vec2& A) const;
};

// Lower convex hull of (x_i, y_i) on a uniform grid, exact at the samples.
ConvexEnvelope convexify_1d(const std::vector<double>& x, const std::vector<double>& y, double tol_coinc = 1e-8);

// Discrete Legendre-Fenchel double transform of samples on the uniform box
// axis × axis. Slopes are sampled on a box of half width slope_bound with the
// same count; the outer pad_frac of the box is excluded from the reported
// region. Extra slopes (e.g. exact gradients at the samples) join the lattice;
// without them an affine Φ whose slope is off the lattice is only reproduced
// to about Δs·r_max.
ConvexEnvelope convexify_nd(const std::vector<double>& axis, const std::vector<double>& values, double slope_bound,
                            double pad_frac = 0.25, double tol_coinc = 1e-8, bool parallel = true,
                            const std::vector<Vec2>& extra_slopes = {});

// Envelope of a catalog potential on [-r_max, r_max]^N; p = q on the
// coincidence set.
ConvexEnvelope build_envelope(const PotentialSpec& spec, double r_max, int samples, const PotentialTolerances& tol = {});

// Convex envelope of a radial profile (optionally shifted by eps/2 r²), with
// the contact points of each flat piece polished by Newton on the common
// tangent equations.
struct RadialHull {
    PotentialSpec base;
    double eps = 0.0;
    double r_max = 0.0;
    std::vector<std::pair<double, double>> intervals;  // non-coincidence pieces in r >= 0
    std::vector<double> slopes;                         // common tangent slope per piece
    bool reliable = true;

    double hs(double r) const { return base.h(r) + 0.5 * eps * r * r; }
    double dhs(double r) const { return base.dh(r) + eps * r; }
    int piece(double r) const;        // -1 on the coincidence set
    double env(double r) const;       // profile of (Φ + eps/2|·|²)**
    double denv(double r) const;
    double env(const Vec2& A) const { return env(norm(A)); }
    Vec2 slope(const Vec2& A) const;  // ∇ of the envelope
    // distance from r to the coincidence set of the shifted profile
    double gap(double r) const;
};
RadialHull radial_hull(const PotentialSpec& spec, double eps, double r_max, int samples = 4001);

struct RecessionTable {
    std::vector<Vec2> directions;
    std::vector<double> phi_inf, qI_inf, env_inf;
    std::vector<double> t_probe;
    std::vector<std::uint8_t> converged;
    double env_tol = 0.0;  // accuracy of env_inf (limited by the box)
    double phi_inf_at(const Vec2& eta) const;  // nearest sampled direction
    double qI_inf_at(const Vec2& eta) const;
};
std::vector<Vec2> sphere_directions(int dim, int count);
RecessionTable recession(const PotentialSpec& spec, const ConvexEnvelope* env, int n_dirs = 16,
                         std::vector<double> t_probe = {}, const PotentialTolerances& tol = {});

struct AdmissibilityEntry {
    std::string name;
    bool pass = false;
    double residual = 0.0;
    std::string detail;
};

struct AdmissibilityReport {
    std::string potential;
    std::vector<AdmissibilityEntry> entries;
    const AdmissibilityEntry& get(const std::string& name) const;
    bool passed(const std::string& name) const { return get(name).pass; }
    bool structure_ok() const;  // SH1-SH4, recession, envelope sanity
    bool strong_ok() const;     // structure_ok plus H1, H2
    bool convex() const { return passed("phi_convex"); }
};
AdmissibilityReport check_admissibility(const PotentialSpec& spec, const ConvexEnvelope& env, const RecessionTable& rec,
                                        const PotentialTolerances& tol = {}, std::uint64_t seed = 1);

}  // namespace ymflow
