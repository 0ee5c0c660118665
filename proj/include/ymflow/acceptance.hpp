#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ymflow/config.hpp"

namespace ymflow {

struct SubCheck {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double budget = 0.0;
    std::string detail;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    double seconds = 0.0;
    std::vector<SubCheck> checks;
    std::vector<std::string> artifacts;
    std::string error;  // exception text when the criterion could not run
};

struct SuiteSettings {
    Tolerances tol;
    std::uint64_t seed = 1;
    int jobs = 1;
    std::string hash;  // producing config
};
SuiteSettings suite_settings(const RunConfig& c);

struct SuiteResult {
    std::vector<CriterionResult> criteria;
    bool passed() const;
};

CriterionResult run_criterion(int id, const SuiteSettings& s, const std::filesystem::path& dir);
// Runs the listed criteria (all nine when empty); failures never abort the suite.
SuiteResult run_suite(const SuiteSettings& s, const std::filesystem::path& dir, std::vector<int> only = {});
void write_suite(const SuiteResult& r, const SuiteSettings& s, const std::filesystem::path& dir);
std::string summary_line(const CriterionResult& c);

// brute-force envelope: max over affine minorants through two samples
std::vector<double> affine_minorant_envelope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace ymflow
