#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "mvgaze/experiments.hpp"

namespace mvgaze {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One scenario block from the run configuration; layouts, camera counts
/// and fusion methods are sweep lists expanded into individual runs.
struct ScenarioEntry {
    std::string name;
    ScenarioSpec base;
    std::vector<LayoutCase> layouts = {LayoutCase::case1};
    std::vector<int> camera_counts = {1};
    std::vector<FusionMethod> fusions = {FusionMethod::simple};
};

struct RunConfig {
    int version = 1;
    std::uint64_t seed = 42;
    std::string output_dir = "out";
    std::vector<ScenarioEntry> entries;
};

struct NamedSpec {
    std::string name;
    ScenarioSpec spec;
};

/// Parse and validate a run configuration. Unknown keys, an unrecognized
/// version or invalid values raise ConfigError with the offending key path.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_string(const std::string& text);

std::string config_to_json(const RunConfig& config);

/// Expand sweep lists into concrete runs; run names are
/// <entry>_<layout>_c<count>_<fusion>.
std::vector<NamedSpec> expand_runs(const RunConfig& config);

/// Write one CSV per report plus a run manifest (config snapshot, seed,
/// format version). Returns the written paths, manifest last.
std::vector<std::string> write_reports(const std::vector<std::string>& names,
                                       const std::vector<MetricsReport>& reports,
                                       const RunConfig& config,
                                       const std::string& out_dir);

/// Versioned JSON serialization of a fitted calibration (bias models and
/// weight maps), so calibration and test phases can run separately.
std::string calibration_to_json(const CalibrationOutcome& calibration);
CalibrationOutcome calibration_from_json(const std::string& text);

}  // namespace mvgaze
