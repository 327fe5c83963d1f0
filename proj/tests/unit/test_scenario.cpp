// test_scenario.cpp - scenario parsing, precondition validation and runs

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "gaussflow/scenario.hpp"
#include "test_support.hpp"

namespace gaussflow::test {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json circle_doc() {
    return json::parse(R"({
        "schema": "gaussflow.scenario/1",
        "id": "circle",
        "ambient": {"kind": "euclidean", "dim": 2},
        "immersion": {"kind": "circle", "params": {"r": 1.0}, "resolution": [32]},
        "flow": {"dt": 1e-4, "steps": 4},
        "checks": [{"id": "frame_drift"}]
    })");
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("gaussflow_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

// =============================================================================
// Parsing
// =============================================================================

TEST(ScenarioParse, DefaultsAreResolved) {
    const Scenario s = parse_scenario(circle_doc());
    EXPECT_EQ(s.id, "circle");
    ASSERT_TRUE(s.problem.has_value());
    EXPECT_EQ(s.problem->counts[0], 32);
    EXPECT_EQ(s.problem->steps, 4);
    EXPECT_EQ(s.resolved["flow"]["integrator"], "rk4");
    EXPECT_EQ(s.resolved["immersion"]["params"]["cx"], 0.0);
    EXPECT_EQ(s.resolved["immersion"]["codimension"], 1);
    EXPECT_DOUBLE_EQ(s.checks[0].tolerance, 1e-8);
}

TEST(ScenarioParse, SchemaTagRequired) {
    json d = circle_doc();
    d["schema"] = "gaussflow.scenario/2";
    EXPECT_THROW(parse_scenario(d), ConfigError);
    d.erase("schema");
    EXPECT_THROW(parse_scenario(d), ConfigError);
}

TEST(ScenarioParse, UnknownFieldsRejected) {
    json d = circle_doc();
    d["ambient"]["radius"] = 2.0;
    EXPECT_THROW(parse_scenario(d), ConfigError);
    d = circle_doc();
    d["immersion"]["params"]["q"] = 1.0;
    EXPECT_THROW(parse_scenario(d), ConfigError);
    d = circle_doc();
    d["checks"][0]["samples"] = 3;
    EXPECT_THROW(parse_scenario(d), ConfigError);
}

TEST(ScenarioParse, DimensionBookkeeping) {
    json d = circle_doc();
    d["ambient"]["dim"] = 3;
    EXPECT_THROW(parse_scenario(d), ConfigError);
    d = circle_doc();
    d["immersion"]["resolution"] = {32, 8};
    EXPECT_THROW(parse_scenario(d), ConfigError);
}

TEST(ScenarioParse, UnknownCatalogEntries) {
    json d = circle_doc();
    d["ambient"]["kind"] = "klein_bottle";
    EXPECT_THROW(parse_scenario(d), ConfigError);
    d = circle_doc();
    d["immersion"]["kind"] = "trefoil";
    EXPECT_THROW(parse_scenario(d), ConfigError);
    d = circle_doc();
    d["checks"][0]["id"] = "nonsense";
    EXPECT_THROW(parse_scenario(d), ConfigError);
}

TEST(ScenarioParse, ChecksDeclaredOnce) {
    json d = circle_doc();
    d["checks"].push_back({{"id", "frame_drift"}});
    EXPECT_THROW(parse_scenario(d), ConfigError);
}

TEST(ScenarioParse, LevelsOnlyForRefinableChecks) {
    json d = circle_doc();
    d["checks"][0]["levels"] = 2;
    EXPECT_THROW(parse_scenario(d), ConfigError);
    EXPECT_TRUE(is_refinable("main_identity"));
    EXPECT_FALSE(is_refinable("oracle_tension"));
}

TEST(ScenarioParse, ImmersionChecksNeedAnImmersion) {
    json d = circle_doc();
    d.erase("immersion");
    EXPECT_THROW(parse_scenario(d), ConfigError);
}

TEST(ScenarioParse, MissingFileIsIoError) {
    EXPECT_THROW(load_scenario("/nonexistent/scenario.json"), IoError);
}

TEST(ScenarioParse, BundledScenariosLoad) {
    const auto files = scenario_files(GAUSSFLOW_SCENARIO_DIR);
    ASSERT_FALSE(files.empty());
    for (const std::string& f : files) {
        const Scenario s = load_scenario(f);
        EXPECT_EQ(s.id + ".json", fs::path(f).filename().string());
        EXPECT_NO_THROW(validate_preconditions(s)) << f;
    }
}

// =============================================================================
// Preconditions
// =============================================================================

TEST(ScenarioPreconditions, SubsolutionNeedsCodimensionOne) {
    const json d = json::parse(R"({
        "schema": "gaussflow.scenario/1", "id": "plane4",
        "ambient": {"kind": "flat_torus", "dim": 4},
        "immersion": {"kind": "affine", "resolution": [9, 9],
                      "params": {"p0": [1, 1, 1, 1], "directions": [[1, 0, 0.2, 0], [0, 1, 0, 0.3]]}},
        "flow": {"steps": 2},
        "checks": [{"id": "subsolution"}]
    })");
    const Scenario s = parse_scenario(d);
    EXPECT_THROW(validate_preconditions(s), PreconditionError);
    try {
        validate_preconditions(s);
    } catch (const Error& e) {
        EXPECT_EQ(exit_code_for(e), ExitCode::config_error);
    }
}

TEST(ScenarioPreconditions, MainIdentityNeedsEvenStepsAndExactAmbient) {
    json d = circle_doc();
    d["checks"] = {{{"id", "main_identity"}, {"levels", 2}}};
    d["flow"]["steps"] = 3;
    EXPECT_THROW(validate_preconditions(parse_scenario(d)), PreconditionError);
    d["flow"]["steps"] = 4;
    d["checks"][0]["first_level"] = -2;
    EXPECT_THROW(validate_preconditions(parse_scenario(d)), PreconditionError);
    d["checks"][0]["first_level"] = 0;
    d["ambient"] = {{"kind", "warped_product"}, {"dim", 2}, {"profile", {1.0, 0.1, 0.0}}};
    EXPECT_THROW(validate_preconditions(parse_scenario(d)), PreconditionError);
}

TEST(ScenarioPreconditions, RuhVilmsNeedsEuclidean) {
    json d = circle_doc();
    d["ambient"] = {{"kind", "flat_torus"}, {"dim", 2}};
    d["immersion"]["params"]["cx"] = 3.0;
    d["immersion"]["params"]["cy"] = 3.0;
    d["checks"] = {{{"id", "ruh_vilms"}}};
    EXPECT_THROW(validate_preconditions(parse_scenario(d)), PreconditionError);
}

TEST(ScenarioPreconditions, SubspaceDimension) {
    const json d = json::parse(R"({
        "schema": "gaussflow.scenario/1", "id": "axioms",
        "ambient": {"kind": "euclidean", "dim": 3},
        "checks": [{"id": "connection_axioms", "m": 3}]
    })");
    EXPECT_THROW(validate_preconditions(parse_scenario(d)), PreconditionError);
}

TEST(ExitCodes, ErrorClasses) {
    EXPECT_EQ(exit_code_for(ConfigError("x")), ExitCode::config_error);
    EXPECT_EQ(exit_code_for(IoError("x")), ExitCode::config_error);
    EXPECT_EQ(exit_code_for(DegeneracyError("x")), ExitCode::numerical_failure);
    EXPECT_EQ(exit_code_for(RankError("x")), ExitCode::numerical_failure);
}

// =============================================================================
// Runs
// =============================================================================

TEST(ScenarioRun, WritesReportAndTimeSeries) {
    const fs::path dir = scratch("run");
    RunOptions o;
    o.out_dir = dir.string();
    const VerificationReport r = run_scenario(parse_scenario(circle_doc()), o);
    EXPECT_TRUE(r.pass());
    EXPECT_EQ(exit_code_for(r), ExitCode::pass);
    EXPECT_TRUE(fs::exists(dir / "circle_report.json"));
    std::ifstream csv(dir / "circle_timeseries.csv");
    std::string header;
    std::getline(csv, header);
    EXPECT_EQ(header, "step,t,metric_scale,min_H,max_H,frame_drift,normality_drift");
    const json j = json::parse(std::ifstream(dir / "circle_report.json"));
    EXPECT_FALSE(j.contains("runtime_s"));
}

TEST(ScenarioRun, ReportsAreReproducible) {
    const json d = json::parse(R"({
        "schema": "gaussflow.scenario/1", "id": "axioms", "seed": 7,
        "ambient": {"kind": "round_sphere", "dim": 2},
        "checks": [{"id": "connection_axioms", "m": 1, "samples": 3}]
    })");
    RunOptions o;
    o.write_files = false;
    const std::string a = report_json(run_scenario(parse_scenario(d), o), 2, false);
    const std::string b = report_json(run_scenario(parse_scenario(d), o), 2, false);
    EXPECT_EQ(a, b);
}

TEST(ScenarioRun, FailedCheckGivesExitOne) {
    json d = circle_doc();
    d["checks"] = {{{"id", "oracle_tension"}, {"nodes", {0, 5}}, {"tolerance", 1e-16}}};
    d["immersion"]["kind"] = "ellipse";
    d["immersion"]["params"] = {{"a", 1.0}, {"b", 0.6}};
    RunOptions o;
    o.write_files = false;
    EXPECT_EQ(exit_code_for(run_scenario(parse_scenario(d), o)), ExitCode::check_failure);
}

TEST(ScenarioRun, ConvergeOverridesLevels) {
    const json d = json::parse(R"({
        "schema": "gaussflow.scenario/1", "id": "catenoid",
        "ambient": {"kind": "euclidean", "dim": 3},
        "immersion": {"kind": "catenoid", "resolution": [16, 9]},
        "checks": [{"id": "ruh_vilms", "levels": 3, "order_floor": 1.8},
                   {"id": "oracle_tension", "nodes": [0]}]
    })");
    RunOptions o;
    o.write_files = false;
    o.levels = 1;
    o.refinable_only = true;
    const VerificationReport r = run_scenario(parse_scenario(d), o);
    ASSERT_EQ(r.checks.size(), 1u);
    EXPECT_EQ(r.checks[0].levels.size(), 1u);
    EXPECT_FALSE(r.checks[0].order.has_value());
}

TEST(ScenarioRun, ExtinctionPropagates) {
    json d = circle_doc();
    d["immersion"]["params"]["r"] = 0.3;
    d["flow"]["steps"] = 1000;
    RunOptions o;
    o.write_files = false;
    try {
        run_scenario(parse_scenario(d), o);
        FAIL() << "expected extinction";
    } catch (const ExtinctionError& e) {
        EXPECT_EQ(exit_code_for(e), ExitCode::numerical_failure);
        EXPECT_GT(e.estimate(), e.last_valid().t);
        EXPECT_LT(e.estimate(), 0.05);
    }
}

TEST(ScenarioRun, ImportedMeshFlows) {
    const fs::path dir = scratch("mesh");
    const auto param = circle(1.0);
    write_mesh_csv(ImmersionMesh::sample(*param, ParamGrid::over(param->domain(), 32)), (dir / "c.csv").string());
    const json d = json::parse(R"({
        "schema": "gaussflow.scenario/1", "id": "imported",
        "ambient": {"kind": "euclidean", "dim": 2},
        "immersion": {"kind": "mesh_csv", "path": "c.csv"},
        "flow": {"dt": 1e-4, "steps": 4},
        "checks": [{"id": "frame_drift"}]
    })");
    RunOptions o;
    o.write_files = false;
    const VerificationReport r = run_scenario(parse_scenario(d, dir.string()), o);
    EXPECT_TRUE(r.pass());
    json bad = d;
    bad["checks"] = {{{"id", "main_identity"}}};
    EXPECT_THROW(parse_scenario(bad, dir.string()), ConfigError);
}

}  // namespace gaussflow::test
