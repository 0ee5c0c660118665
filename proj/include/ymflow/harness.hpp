#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ymflow/acceptance.hpp"
#include "ymflow/config.hpp"
#include "ymflow/continuation.hpp"
#include "ymflow/potential.hpp"
#include "ymflow/strong_flow.hpp"
#include "ymflow/young_measure.hpp"

namespace ymflow {

// Potential plus everything derived from it once per run.
struct Setup {
    PotentialSpec spec;
    ConvexEnvelope env;
    RecessionTable rec;
    AdmissibilityReport admissibility;
    std::optional<RadialHull> hull;  // radial potentials only
    CoincidenceOracle oracle;
};
Setup prepare(const RunConfig& c);

ScheduleSettings schedule_settings(const RunConfig& c);
BinSpec bin_spec(const RunConfig& c);
EstimateSettings estimate_settings(const RunConfig& c);

struct ContinuationOutcome {
    LimitBundle bundle;
    std::vector<GeneralizedYoungMeasure> measures;  // one per checkpoint
    std::vector<StructuralReport> reports;
    StructuralReport worst;
    std::optional<BoundsReport> bounds;
    std::optional<WeakFormResidual> weak;
    std::size_t laminated_sites = 0;  // faces of the final measure with two separated atoms
};
ContinuationOutcome run_continuation(const RunConfig& c, const Setup& s, const ScalarField& u0);
// worst structural residuals against their budgets (support, independence, JF, barycentre, Jensen)
std::vector<SubCheck> structural_checks(const RunConfig& c, const Setup& s, const ContinuationOutcome& o);

struct ContractionOutcome {
    std::vector<double> times, distance;
    double d0 = 0.0;
    double worst_increase = 0.0;  // largest checkpoint-to-checkpoint growth
    double i1_min = 0.0;
    std::size_t i1_checked = 0;
    std::vector<std::pair<std::size_t, double>> i1_final;
    bool contracting = false, i1_ok = false;
};
ContractionOutcome run_contraction(const RunConfig& c, const Setup& s, const ScalarField& a, const ScalarField& b,
                                   int i1_every = 1);

struct CompareOutcome {
    ContinuationOutcome ym;
    StrongTrajectory strong;
    EquivalenceReport eq;
    AnzellottiReport pairing;  // z = q(∇u_strong) at the final checkpoint
};
CompareOutcome run_compare(const RunConfig& c, const Setup& s, const ScalarField& u0);

// Subcommands. Each writes into <root>/<name>/ and returns a process exit status.
int cmd_catalog(const RunConfig& c, const std::filesystem::path& root);
int cmd_convexify(const RunConfig& c, const std::filesystem::path& root);
int cmd_continuation(const RunConfig& c, const std::filesystem::path& root, bool override_admissibility);
int cmd_contraction(const RunConfig& c, const std::filesystem::path& root);
int cmd_compare(const RunConfig& c, const std::filesystem::path& root);
int cmd_verify(const RunConfig& c, const std::filesystem::path& root, const std::vector<int>& only = {});
int cmd_report(const std::filesystem::path& root);

// static SVG renders
struct Series {
    std::string label;
    std::vector<double> x, y;
};
std::string svg_lines(const std::string& title, const std::string& xlabel, const std::vector<Series>& series, bool logy = false);
std::string svg_heatmap(const std::string& title, int nx, int ny, const std::vector<double>& v);

}  // namespace ymflow
