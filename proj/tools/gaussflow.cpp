// gaussflow.cpp - command line front end: run, converge, suite, describe.

#include "gaussflow/parallel.hpp"
#include "gaussflow/scenario.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>

using namespace gaussflow;
namespace fs = std::filesystem;

namespace {

int report_error(const std::string& code, const std::string& message, ExitCode exit) {
    std::fprintf(stderr, "error %s: %s\n", code.c_str(), message.c_str());
    return int(exit);
}

// Runs one scenario file and maps every outcome to an exit status; the
// numerical failure path leaves the last valid state next to the report.
int run_file(const std::string& path, const RunOptions& options, bool quiet = false) {
    std::optional<Scenario> scenario;
    try {
        scenario = load_scenario(path);
        const VerificationReport report = run_scenario(*scenario, options);
        if (!quiet) std::cout << summary_table(report);
        return int(exit_code_for(report));
    } catch (const ExtinctionError& e) {
        char estimate[64];
        std::snprintf(estimate, sizeof estimate, "%.6g", e.estimate());
        std::string message = std::string(e.what()) + "; extinction time estimate " + estimate +
                              "; last valid state at t = " + std::to_string(e.last_valid().t);
        try {
            const std::string dir = options.out_dir.value_or(scenario->out_dir);
            fs::create_directories(dir);
            const std::string dump = (fs::path(dir) / (scenario->id + "_last_valid.csv")).string();
            write_mesh_csv(e.last_valid().mesh, dump);
            message += " written to " + dump;
        } catch (const std::exception& w) {
            message += std::string(" (dump failed: ") + w.what() + ")";
        }
        return report_error(std::string(to_string(e.code())), message, ExitCode::numerical_failure);
    } catch (const Error& e) {
        return report_error(std::string(to_string(e.code())), e.what(), exit_code_for(e));
    } catch (const fs::filesystem_error& e) {
        return report_error("E_IO", e.what(), ExitCode::config_error);
    } catch (const std::exception& e) {
        return report_error("E_INTERNAL", e.what(), ExitCode::numerical_failure);
    }
}

std::string default_scenario_dir() {
    if (const char* env = std::getenv("GAUSSFLOW_SCENARIO_DIR")) return env;
    return GAUSSFLOW_SCENARIO_DIR;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gauss map flows: scenario runs, convergence studies and identity checks"};
    app.require_subcommand(1);

    std::string file, out, filter, dir = default_scenario_dir();
    int levels = 3;

    auto* run = app.add_subcommand("run", "run a scenario's flow and checks");
    run->add_option("file", file, "scenario file")->required();
    run->add_option("--out", out, "output directory for the report and time series");

    auto* converge = app.add_subcommand("converge", "run the refinable checks over successive (h, dt) halvings");
    converge->add_option("file", file, "scenario file")->required();
    converge->add_option("--levels", levels, "number of levels")->required()->check(CLI::PositiveNumber);
    converge->add_option("--out", out, "output directory");

    auto* suite = app.add_subcommand("suite", "run every bundled scenario");
    suite->add_option("--filter", filter, "only scenarios whose file name contains this text");
    suite->add_option("--dir", dir, "scenario directory");
    suite->add_option("--out", out, "output directory");

    auto* describe = app.add_subcommand("describe", "print a scenario with every default resolved");
    describe->add_option("file", file, "scenario file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return report_error("E_CONFIG", "invalid command line", ExitCode::config_error);
    }

    RunOptions options;
    if (!out.empty()) options.out_dir = out;

    if (*run) return run_file(file, options);

    if (*converge) {
        options.levels = levels;
        options.refinable_only = true;
        return run_file(file, options);
    }

    if (*describe) {
        try {
            const Scenario s = load_scenario(file);
            nlohmann::json j = s.resolved;
            j["threads"] = worker_count();
            std::cout << j.dump(2) << "\n";
            return 0;
        } catch (const Error& e) {
            return report_error(std::string(to_string(e.code())), e.what(), exit_code_for(e));
        } catch (const std::exception& e) {
            return report_error("E_INTERNAL", e.what(), ExitCode::numerical_failure);
        }
    }

    // suite: the worst exit status over the selected scenarios.
    std::vector<std::string> files;
    try {
        files = scenario_files(dir);
    } catch (const Error& e) {
        return report_error(std::string(to_string(e.code())), e.what(), exit_code_for(e));
    }
    int worst = 0, selected = 0;
    for (const std::string& f : files) {
        if (!filter.empty() && fs::path(f).filename().string().find(filter) == std::string::npos) continue;
        ++selected;
        std::cout << "== " << fs::path(f).filename().string() << "\n" << std::flush;
        worst = std::max(worst, run_file(f, options));
    }
    if (selected == 0) return report_error("E_CONFIG", "no scenario matches '" + filter + "'", ExitCode::config_error);
    std::cout << (worst == 0 ? "suite PASS" : "suite FAIL") << " (" << selected << " scenarios)\n";
    return worst;
}
