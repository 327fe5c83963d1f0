// runner.cpp - flow run, check dispatch and exit status for scenarios.

#include "gaussflow/scenario.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

namespace gaussflow {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// ============================================================================
// Base-resolution flow

CheckResult run_flow(const Scenario& s, const RunOptions& options, double tolerance, bool report) {
    const json& flow = s.resolved.at("flow");
    FlowOptions fo;
    fo.dt = flow.at("dt").get<double>();
    fo.integrator = integrator_from_string(flow.at("integrator").get<std::string>());
    fo.reorthonormalize_every = s.reorthonormalize_every;
    fo.drift_limit = s.drift_limit;
    fo.record_every = s.record_every;
    const double t0 = flow.at("t0").get<double>();
    const int steps = s.flow_steps();

    FlowState state = s.problem ? s.problem->state() : initial_state(s.ambient(), *s.mesh, t0);
    VelocityField velocity;
    if (s.problem) {
        velocity = s.problem->velocity();
    } else {
        velocity = mean_curvature_velocity(s.ambient());
        const ParamDomain& d = s.mesh->grid().domain;
        const bool bounded = !d.periodic[0] || (d.dim > 1 && !d.periodic[1]);
        if (bounded && s.resolved.at("immersion").value("neumann_edges", true))
            velocity = with_neumann_edges(velocity, s.ambient());
    }
    const FlowRun run = integrate(s.ambient(), std::move(state), t0 + steps * fo.dt, fo, velocity);

    if (options.write_files && s.timeseries) {
        const std::string dir = options.out_dir.value_or(s.out_dir);
        fs::create_directories(dir);
        write_timeseries_csv(run.series, (fs::path(dir) / (s.id + "_timeseries.csv")).string());
    }
    CheckResult r;
    r.name = "frame_drift";
    r.tolerance = report ? tolerance : 0.0;
    r.residual_max = run.max_drift_rate;
    r.residual_mean = run.max_drift_rate;
    r.extras["max_drift"] = run.max_drift;
    r.extras["drift_rate"] = run.max_drift_rate;
    r.extras["t_final"] = run.final_state.t;
    r.extras["steps"] = steps;
    r.note = "largest orthonormality/normality drift of the Uhlenbeck frames per unit time";
    finalize(r);
    return r;
}

// ============================================================================
// Checks

RhoFunction rho_of(const json& spec) {
    const std::string kind = spec.value("kind", "sin2_fiber_angle");
    if (kind == "sin2_fiber_angle") return RhoFunction::sin2_fiber_angle(spec.value("axis", 1));
    if (kind == "constant") return RhoFunction::constant(spec.value("value", 0.0));
    throw ConfigError("unknown rho kind '" + kind + "'");
}

RuhVilmsMode mode_of(const std::string& name) {
    if (name == "automatic") return RuhVilmsMode::automatic;
    if (name == "identity") return RuhVilmsMode::identity;
    if (name == "minimal") return RuhVilmsMode::minimal;
    throw ConfigError("unknown ruh_vilms mode '" + name + "'");
}

std::vector<int> oracle_nodes(const json& spec, const Problem& p) {
    const int count = p.grid().node_count();
    std::vector<int> nodes;
    if (!spec.is_array()) {
        for (int k = 0; k < count; ++k) nodes.push_back(k);
        return nodes;
    }
    for (const auto& v : spec) {
        const int k = v.get<int>();
        if (k < 0 || k >= count) throw ConfigError("oracle node " + std::to_string(k) + " is out of range");
        nodes.push_back(k);
    }
    return nodes;
}

double radius_of(const Scenario& s) {
    const json& im = s.resolved.at("immersion");
    return im.at("params").value("r", 1.0);
}

std::vector<CheckResult> run_check(const Scenario& s, const CheckSpec& c, int levels, const RunOptions& options) {
    const MetricFamily& metric = s.ambient();
    const json& o = c.options;
    if (c.id == "connection_axioms")
        return {check_connection_axioms(metric, o.value("m", 1), o.value("alphas", std::vector<double>{1.0}),
                                        o.value("samples", 100), s.seed, c.tolerance)};
    if (c.id == "script_R_zero")
        return {check_script_R_zero(metric, o.value("m", 1), o.value("samples", 50), s.seed, c.tolerance)};
    if (c.id == "script_R_components")
        return {check_script_R_components(metric, o.value("m", 1), o.value("samples", 50), s.seed, c.tolerance)};
    if (c.id == "frame_drift") return {run_flow(s, options, c.tolerance, true)};

    const Problem& p = *s.problem;
    if (c.id == "oracle_tension")
        return {check_oracle_tension(p, oracle_nodes(o.value("nodes", json("all")), p), c.tolerance)};
    if (c.id == "ruh_vilms")
        return {check_ruh_vilms(p, levels, c.tolerance, c.order_floor, mode_of(o.value("mode", "automatic")),
                                c.first_level)};
    if (c.id == "variational_field") {
        std::vector<double> dts = o.at("dts").get<std::vector<double>>();
        if (options.levels) {
            const double dt0 = dts.front();
            dts.clear();
            for (int k = 0; k < levels; ++k) dts.push_back(std::ldexp(dt0, -k));
        }
        CheckResult r = check_variational_field(p, dts, c.order_floor);
        r.tolerance = c.tolerance;
        finalize(r);
        return {r};
    }
    if (c.id == "main_identity")
        return {check_main_identity(p, levels, c.tolerance, c.order_floor, c.first_level, o.value("time_stride", 1))};
    if (c.id == "proof_chain") return check_proof_chain(p, c.tolerance);
    if (c.id == "radius_law")
        return {check_radius_law(p, o.value("r0", radius_of(s)), o.value("fraction", 0.4), c.tolerance)};
    if (c.id == "subsolution")
        return check_subsolution(p, rho_of(o.value("rho", json::object())), levels, c.order_floor, c.first_level);
    throw ConfigError("unknown check '" + c.id + "'");
}

}  // namespace

// ============================================================================
// Scenario runs

VerificationReport run_scenario(const Scenario& s, const RunOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    validate_preconditions(s, options.levels);
    VerificationReport report;
    report.scenario = s.id;

    // The time series comes from the base-resolution flow; frame_drift reuses it.
    bool flow_done = false;
    for (const CheckSpec& c : s.checks) {
        if (options.refinable_only && !is_refinable(c.id)) continue;
        if (c.id == "frame_drift") flow_done = true;
        const int levels = options.levels && is_refinable(c.id) ? *options.levels : c.levels;
        for (CheckResult& r : run_check(s, c, levels, options)) report.add(std::move(r));
    }
    if (!flow_done && !options.refinable_only && options.write_files && s.timeseries && s.has_immersion() &&
        s.flow_steps() > 0)
        run_flow(s, options, 0.0, false);

    report.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (options.write_files) {
        const std::string dir = options.out_dir.value_or(s.out_dir);
        fs::create_directories(dir);
        const std::string path = (fs::path(dir) / (s.id + "_report.json")).string();
        std::ofstream out(path);
        if (!out) throw IoError("cannot write report '" + path + "'");
        out << report_json(report, 2, false) << "\n";
    }
    return report;
}

ExitCode exit_code_for(const VerificationReport& report) {
    return report.pass() ? ExitCode::pass : ExitCode::check_failure;
}

ExitCode exit_code_for(const Error& error) {
    switch (error.code()) {
        case ErrorCode::config:
        case ErrorCode::usage:
        case ErrorCode::precondition:
        case ErrorCode::io:
            return ExitCode::config_error;
        case ErrorCode::domain:
        case ErrorCode::degeneracy:
        case ErrorCode::chart:
        case ErrorCode::rank:
        case ErrorCode::stencil:
        case ErrorCode::extinction:
            return ExitCode::numerical_failure;
    }
    return ExitCode::numerical_failure;
}

}  // namespace gaussflow
