// scenario.hpp - scenario files, check dispatch and report emission.
//
// A scenario names one ambient metric family, at most one immersion with its
// discretization, the flow settings and a list of checks. Files are JSON with
// the schema tag "gaussflow.scenario/1"; docs/formats.md lists every field.

#pragma once

#include "gaussflow/verify.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gaussflow {

inline constexpr const char* kScenarioSchema = "gaussflow.scenario/1";

// Exit status of the command line runner.
enum class ExitCode : int { pass = 0, check_failure = 1, config_error = 2, numerical_failure = 3 };

struct CheckSpec {
    std::string id;
    double tolerance = 0.0;
    double order_floor = 0.0;
    int levels = 1;
    int first_level = 0;
    nlohmann::json options = nlohmann::json::object();  // check-specific keys
};

struct Scenario {
    std::string id;
    std::string description;
    std::string source;  // file the scenario was read from
    std::uint64_t seed = 1;
    std::optional<MetricFamily> metric;
    std::optional<Problem> problem;       // catalog immersion
    std::optional<ImmersionMesh> mesh;    // imported node table
    int reorthonormalize_every = 100;
    double drift_limit = 1e-6;
    int record_every = 1;
    std::vector<CheckSpec> checks;
    std::string out_dir = "out";
    bool timeseries = true;
    nlohmann::json resolved;  // every field with defaults filled in

    const MetricFamily& ambient() const { return *metric; }
    bool has_immersion() const { return problem.has_value() || mesh.has_value(); }
    int flow_steps() const;
};

// Parses and validates dimensions and catalog references; throws ConfigError
// (IoError for unreadable files). Relative paths inside the file resolve
// against `base_dir`.
Scenario parse_scenario(const nlohmann::json& doc, const std::string& base_dir = ".");
Scenario load_scenario(const std::string& path);

// Checks every declared check's preconditions without running it; throws
// PreconditionError (or ConfigError) with a diagnostic. levels_override
// replaces the declared levels of refinable checks.
void validate_preconditions(const Scenario& scenario, std::optional<int> levels_override = {});

// Check ids that take refinement levels.
bool is_refinable(const std::string& check_id);
const std::vector<std::string>& known_checks();

struct RunOptions {
    bool write_files = true;
    std::optional<std::string> out_dir;  // overrides the scenario's
    std::optional<int> levels;           // converge: levels for refinable checks
    bool refinable_only = false;         // converge: skip the other checks
};

// Runs the base-resolution flow (time series, frame drift) and the declared
// checks. Throws ExtinctionError and the other numerical errors unchanged.
VerificationReport run_scenario(const Scenario& scenario, const RunOptions& options = {});

// Exit status for a finished report and for an error thrown while loading,
// validating or running a scenario.
ExitCode exit_code_for(const VerificationReport& report);
ExitCode exit_code_for(const Error& error);

// Scenario files (*.json) of a directory, sorted by name.
std::vector<std::string> scenario_files(const std::string& dir);

}  // namespace gaussflow
