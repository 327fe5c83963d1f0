// report.cpp - check results, convergence orders and report serialization.

#include "gaussflow/verify.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace gaussflow {

bool VerificationReport::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

const CheckResult& VerificationReport::check(const std::string& name) const {
    for (const CheckResult& c : checks)
        if (c.name == name) return c;
    throw UsageError("report has no check named '" + name + "'");
}

void VerificationReport::add(CheckResult result) {
    for (const CheckResult& c : checks)
        if (c.name == result.name) throw UsageError("check '" + result.name + "' reported twice");
    checks.push_back(std::move(result));
}

void finalize(CheckResult& r) {
    r.orders.clear();
    r.order.reset();
    r.flagged = false;
    if (!r.levels.empty()) {
        if (r.base >= r.levels.size()) r.base = 0;
        r.residual_max = r.levels[r.base].residual_max;
        r.residual_mean = r.levels[r.base].residual_mean;
    }
    for (std::size_t k = 0; k + 1 < r.levels.size(); ++k) {
        const double coarse = r.levels[k].residual_max;
        const double fine = r.levels[k + 1].residual_max;
        if (!(coarse >= kRoundingFloor) || !(fine >= kRoundingFloor)) {
            r.orders.push_back(std::nullopt);
            continue;
        }
        const double order = std::log2(coarse / fine);
        r.orders.push_back(order);
        if (fine >= coarse) {
            r.flagged = true;
            continue;
        }
        r.order = r.order ? std::min(*r.order, order) : order;
    }
    const bool finite = std::isfinite(r.residual_max);
    const bool within = r.tolerance <= 0.0 || r.residual_max <= r.tolerance;
    const bool fast = r.order_floor <= 0.0 || !r.order || *r.order >= r.order_floor;
    r.pass = finite && within && fast;
    if (r.flagged && r.note.find("non-monotone") == std::string::npos)
        r.note += std::string(r.note.empty() ? "" : "; ") + "non-monotone residuals between levels";
}

CheckResult convergence_study(const std::string& name, const std::function<LevelResidual(int level)>& level_run,
                              int levels, double tolerance, double order_floor, int first) {
    if (levels < 1) throw UsageError("convergence study needs at least one level");
    CheckResult r;
    r.name = name;
    r.tolerance = tolerance;
    r.order_floor = order_floor;
    r.base = (first <= 0 && -first < levels) ? std::size_t(-first) : 0;
    for (int k = 0; k < levels; ++k) r.levels.push_back(level_run(first + k));
    finalize(r);
    return r;
}

// ============================================================================
// Serialization

namespace {

nlohmann::json optional_json(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

// JSON has no infinities or NaN; report them as strings.
nlohmann::json number_json(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

std::string format(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

}  // namespace

std::string report_json(const VerificationReport& report, int indent, bool include_runtime) {
    nlohmann::json j;
    j["scenario"] = report.scenario;
    j["pass"] = report.pass();
    if (include_runtime) j["runtime_s"] = report.runtime;
    j["checks"] = nlohmann::json::array();
    for (const CheckResult& c : report.checks) {
        nlohmann::json cj;
        cj["name"] = c.name;
        cj["residual_max"] = number_json(c.residual_max);
        cj["residual_mean"] = number_json(c.residual_mean);
        cj["order"] = optional_json(c.order);
        cj["tolerance"] = c.tolerance;
        cj["order_floor"] = c.order_floor;
        cj["pass"] = c.pass;
        cj["base_level"] = c.base;
        cj["flagged"] = c.flagged;
        cj["levels"] = nlohmann::json::array();
        for (const LevelResidual& l : c.levels)
            cj["levels"].push_back({{"label", l.label},
                                    {"h", l.h},
                                    {"dt", l.dt},
                                    {"residual_max", number_json(l.residual_max)},
                                    {"residual_mean", number_json(l.residual_mean)}});
        cj["orders"] = nlohmann::json::array();
        for (const auto& o : c.orders) cj["orders"].push_back(optional_json(o));
        cj["extras"] = nlohmann::json::object();
        for (const auto& [k, v] : c.extras) cj["extras"][k] = number_json(v);
        if (!c.note.empty()) cj["note"] = c.note;
        j["checks"].push_back(cj);
    }
    return j.dump(indent);
}

std::string summary_table(const VerificationReport& report) {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof line, "%-34s %11s %11s %7s %10s %6s  %s\n", "check", "max", "mean", "order", "tol",
                  "floor", "status");
    out << "scenario: " << report.scenario << "\n" << line;
    for (const CheckResult& c : report.checks) {
        std::snprintf(line, sizeof line, "%-34s %11s %11s %7s %10s %6s  %s%s\n", c.name.c_str(),
                      format(c.residual_max).c_str(), format(c.residual_mean).c_str(),
                      c.order ? std::to_string(*c.order).substr(0, 5).c_str() : "-",
                      c.tolerance > 0.0 ? format(c.tolerance).c_str() : "-",
                      c.order_floor > 0.0 ? std::to_string(c.order_floor).substr(0, 4).c_str() : "-",
                      c.pass ? "PASS" : "FAIL", c.flagged ? " (flagged)" : "");
        out << line;
        for (const LevelResidual& l : c.levels) {
            std::snprintf(line, sizeof line, "    %-30s %11s %11s\n", l.label.c_str(), format(l.residual_max).c_str(),
                          format(l.residual_mean).c_str());
            out << line;
        }
    }
    std::snprintf(line, sizeof line, "%s in %.1f s\n", report.pass() ? "PASS" : "FAIL", report.runtime);
    out << line;
    return out.str();
}

}  // namespace gaussflow
