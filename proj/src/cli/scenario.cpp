// scenario.cpp - scenario file parsing and precondition validation.

#include "gaussflow/scenario.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace gaussflow {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// ============================================================================
// Field access with diagnostics

std::string where(const std::string& ctx, const std::string& key) { return ctx.empty() ? key : ctx + "." + key; }

void only_keys(const json& obj, const std::string& ctx, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError("'" + ctx + "' must be an object");
    for (const auto& [k, v] : obj.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }))
            throw ConfigError("unknown field '" + where(ctx, k) + "'");
    }
}

template <class T>
T get(const json& obj, const std::string& ctx, const std::string& key, const T& fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("field '" + where(ctx, key) + "' has the wrong type");
    }
}

template <class T>
T require(const json& obj, const std::string& ctx, const std::string& key) {
    if (!obj.contains(key)) throw ConfigError("missing field '" + where(ctx, key) + "'");
    return get<T>(obj, ctx, key, T{});
}

double positive(double v, const std::string& name) {
    if (!(v > 0.0)) throw ConfigError("'" + name + "' must be positive");
    return v;
}

int positive(int v, const std::string& name) {
    if (v < 1) throw ConfigError("'" + name + "' must be at least 1");
    return v;
}

Vec vec_of(const std::vector<double>& v) { return Eigen::Map<const Vec>(v.data(), Eigen::Index(v.size())); }

std::string resolve_path(const std::string& path, const std::string& base) {
    const fs::path p(path);
    return p.is_absolute() ? path : (fs::path(base) / p).string();
}

// ============================================================================
// Ambient

MetricFamily parse_ambient(const json& a, const std::string& base, json& resolved) {
    const std::string ctx = "ambient";
    const std::string kind = require<std::string>(a, ctx, "kind");
    const double f = get<double>(a, ctx, "f", 0.0);
    resolved = {{"kind", kind}};
    if (kind == "euclidean" || kind == "flat_torus" || kind == "round_sphere" || kind == "hyperbolic") {
        const int n = positive(require<int>(a, ctx, "dim"), "ambient.dim");
        resolved["dim"] = n;
        resolved["f"] = f;
        if (kind == "euclidean") {
            only_keys(a, ctx, {"kind", "dim", "f"});
            return MetricFamily::euclidean(n, f);
        }
        if (kind == "flat_torus") {
            only_keys(a, ctx, {"kind", "dim", "period", "f"});
            const double period = positive(get<double>(a, ctx, "period", 2.0 * 3.14159265358979323846), "ambient.period");
            resolved["period"] = period;
            return MetricFamily::flat_torus(n, period, f);
        }
        if (kind == "round_sphere") {
            only_keys(a, ctx, {"kind", "dim", "radius", "f"});
            const double r = positive(get<double>(a, ctx, "radius", 1.0), "ambient.radius");
            resolved["radius"] = r;
            return MetricFamily::round_sphere(n, r, f);
        }
        only_keys(a, ctx, {"kind", "dim", "scale", "f"});
        const double s = positive(get<double>(a, ctx, "scale", 1.0), "ambient.scale");
        resolved["scale"] = s;
        return MetricFamily::hyperbolic(n, s, f);
    }
    if (kind == "product_spheres") {
        only_keys(a, ctx, {"kind", "r1", "r2", "f"});
        const double r1 = positive(get<double>(a, ctx, "r1", 1.0), "ambient.r1");
        const double r2 = positive(get<double>(a, ctx, "r2", 1.0), "ambient.r2");
        resolved.update({{"dim", 4}, {"r1", r1}, {"r2", r2}, {"f", f}});
        return MetricFamily::product_spheres(r1, r2, f);
    }
    if (kind == "warped_product") {
        only_keys(a, ctx, {"kind", "dim", "profile"});
        const int n = positive(require<int>(a, ctx, "dim"), "ambient.dim");
        const auto w = get<std::vector<double>>(a, ctx, "profile", {1.0, 0.0, 0.0});
        if (w.size() != 3) throw ConfigError("'ambient.profile' needs three coefficients w0, w1, w2");
        resolved.update({{"dim", n}, {"profile", w}});
        return MetricFamily::warped_product(n, WarpProfile{w[0], w[1], w[2]});
    }
    if (kind == "grid_sampled") {
        only_keys(a, ctx, {"kind", "table"});
        const std::string path = resolve_path(require<std::string>(a, ctx, "table"), base);
        const GridTable table = fs::path(path).extension() == ".csv" ? read_grid_csv(path) : read_grid_binary(path);
        resolved.update({{"dim", table.dim}, {"table", path}});
        return MetricFamily::grid_sampled(table);
    }
    throw ConfigError("unknown ambient kind '" + kind + "'");
}

// ============================================================================
// Immersion catalog

struct CatalogEntry {
    const char* name;
    std::vector<std::pair<const char*, double>> params;  // name, default
};

const std::vector<CatalogEntry>& catalog() {
    static const std::vector<CatalogEntry> entries = {
        {"circle", {{"r", 1.0}, {"cx", 0.0}, {"cy", 0.0}}},
        {"ellipse", {{"a", 1.0}, {"b", 0.8}, {"cx", 0.0}, {"cy", 0.0}}},
        {"perturbed_circle", {{"r", 1.0}, {"eps", 0.1}, {"mode", 3.0}, {"cx", 0.0}, {"cy", 0.0}}},
        {"great_circle", {}},
        {"perturbed_great_circle", {{"eps", 0.07}, {"mode", 2.0}}},
        {"sphere", {{"r", 1.0}, {"half_width", 0.5}}},
        {"cylinder", {{"r", 1.0}, {"half_height", 1.0}}},
        {"graph", {{"c0", 0.0}, {"cxx", 1.0}, {"cxy", 0.0}, {"cyy", 1.0}, {"half", 1.0}}},
        {"catenoid", {{"c", 1.0}, {"half_height", 1.0}}},
        {"torus_product", {{"theta1", 1.5707963267948966}, {"theta2", 1.5707963267948966}}},
        {"perturbed_torus", {{"eps", 0.05}, {"mode", 2.0}}},
    };
    return entries;
}

int integer_param(double v, const std::string& name) {
    if (v != std::floor(v)) throw ConfigError("'" + name + "' must be an integer");
    return int(v);
}

ParametrizationPtr make_catalog(const std::string& kind, const json& params, json& resolved) {
    const std::string ctx = "immersion.params";
    if (kind == "affine") {
        only_keys(params, ctx, {"p0", "directions"});
        const auto p0 = require<std::vector<double>>(params, ctx, "p0");
        const auto dirs = require<std::vector<std::vector<double>>>(params, ctx, "directions");
        if (dirs.empty() || dirs.size() > 2) throw ConfigError("'immersion.params.directions' needs one or two vectors");
        Mat d(Eigen::Index(p0.size()), Eigen::Index(dirs.size()));
        for (std::size_t c = 0; c < dirs.size(); ++c) {
            if (dirs[c].size() != p0.size()) throw ConfigError("affine direction length differs from p0");
            d.col(Eigen::Index(c)) = vec_of(dirs[c]);
        }
        resolved = {{"p0", p0}, {"directions", dirs}};
        return affine(vec_of(p0), d);
    }
    const auto it = std::find_if(catalog().begin(), catalog().end(), [&](const CatalogEntry& e) { return kind == e.name; });
    if (it == catalog().end()) throw ConfigError("unknown immersion kind '" + kind + "'");
    if (!params.is_object()) throw ConfigError("'" + ctx + "' must be an object");
    std::map<std::string, double> v;
    for (const auto& [name, def] : it->params) v[name] = get<double>(params, ctx, name, def);
    for (const auto& [k, val] : params.items())
        if (!v.count(k)) throw ConfigError("unknown field '" + where(ctx, k) + "'");
    resolved = json::object();
    for (const auto& [k, val] : v) resolved[k] = val;
    if (kind == "circle") return circle(positive(v["r"], "r"), v["cx"], v["cy"]);
    if (kind == "ellipse") return ellipse(positive(v["a"], "a"), positive(v["b"], "b"), v["cx"], v["cy"]);
    if (kind == "perturbed_circle")
        return perturbed_circle(positive(v["r"], "r"), v["eps"], integer_param(v["mode"], "mode"), v["cx"], v["cy"]);
    if (kind == "great_circle") return great_circle();
    if (kind == "perturbed_great_circle") return perturbed_great_circle(v["eps"], integer_param(v["mode"], "mode"));
    if (kind == "sphere") return sphere(positive(v["r"], "r"), positive(v["half_width"], "half_width"));
    if (kind == "cylinder") return cylinder(positive(v["r"], "r"), positive(v["half_height"], "half_height"));
    if (kind == "graph") return graph(v["c0"], v["cxx"], v["cxy"], v["cyy"], positive(v["half"], "half"));
    if (kind == "catenoid") return catenoid(positive(v["c"], "c"), positive(v["half_height"], "half_height"));
    if (kind == "torus_product") return torus_product(v["theta1"], v["theta2"]);
    return perturbed_torus(v["eps"], integer_param(v["mode"], "mode"));
}

// ============================================================================
// Checks

struct CheckSchema {
    const char* id;
    bool refinable;
    bool needs_immersion;
    double tolerance;  // default
    std::vector<const char*> options;
};

const std::vector<CheckSchema>& check_schemas() {
    static const std::vector<CheckSchema> s = {
        {"connection_axioms", false, false, 1e-6, {"m", "alphas", "samples"}},
        {"script_R_zero", false, false, 0.0, {"m", "samples"}},
        {"script_R_components", false, false, 1e-10, {"m", "samples"}},
        {"oracle_tension", false, true, 1e-5, {"nodes"}},
        {"ruh_vilms", true, true, 0.0, {"mode"}},
        {"variational_field", true, true, 0.0, {"dts"}},
        {"main_identity", true, true, 0.0, {"time_stride"}},
        {"proof_chain", false, true, 1e-8, {}},
        {"radius_law", false, true, 1e-6, {"r0", "fraction"}},
        {"subsolution", true, true, 0.0, {"rho"}},
        {"frame_drift", false, true, 1e-8, {}},
    };
    return s;
}

const CheckSchema& schema_of(const std::string& id) {
    for (const auto& s : check_schemas())
        if (id == s.id) return s;
    throw ConfigError("unknown check '" + id + "'");
}

CheckSpec parse_check(const json& c, std::size_t index) {
    const std::string ctx = "checks[" + std::to_string(index) + "]";
    if (!c.is_object()) throw ConfigError("'" + ctx + "' must be an object");
    CheckSpec spec;
    spec.id = require<std::string>(c, ctx, "id");
    const CheckSchema& schema = schema_of(spec.id);
    spec.tolerance = get<double>(c, ctx, "tolerance", schema.tolerance);
    spec.order_floor = get<double>(c, ctx, "order_floor", 0.0);
    spec.levels = positive(get<int>(c, ctx, "levels", 1), ctx + ".levels");
    spec.first_level = get<int>(c, ctx, "first_level", 0);
    if (!schema.refinable && (c.contains("levels") || c.contains("first_level") || c.contains("order_floor")))
        throw ConfigError("check '" + spec.id + "' does not take refinement levels");
    for (const auto& [k, v] : c.items()) {
        if (k == "id" || k == "tolerance" || k == "order_floor" || k == "levels" || k == "first_level") continue;
        if (std::none_of(schema.options.begin(), schema.options.end(), [&](const char* o) { return k == o; }))
            throw ConfigError("unknown field '" + where(ctx, k) + "'");
        spec.options[k] = v;
    }
    return spec;
}

}  // namespace

// ============================================================================
// Scenario

int Scenario::flow_steps() const { return problem ? problem->steps : resolved.at("flow").value("steps", 0); }

bool is_refinable(const std::string& check_id) { return schema_of(check_id).refinable; }

const std::vector<std::string>& known_checks() {
    static const std::vector<std::string> ids = [] {
        std::vector<std::string> v;
        for (const auto& s : check_schemas()) v.emplace_back(s.id);
        return v;
    }();
    return ids;
}

Scenario parse_scenario(const json& doc, const std::string& base_dir) {
    only_keys(doc, "", {"schema", "id", "description", "seed", "ambient", "immersion", "flow", "checks", "output"});
    const std::string schema = require<std::string>(doc, "", "schema");
    if (schema != kScenarioSchema)
        throw ConfigError("unsupported schema '" + schema + "' (expected '" + kScenarioSchema + "')");
    Scenario s;
    s.id = require<std::string>(doc, "", "id");
    if (s.id.empty()) throw ConfigError("'id' must not be empty");
    s.description = get<std::string>(doc, "", "description", "");
    s.seed = get<std::uint64_t>(doc, "", "seed", 1);
    s.resolved = {{"schema", schema}, {"id", s.id}, {"description", s.description}, {"seed", s.seed}};

    json ambient;
    if (!doc.contains("ambient")) throw ConfigError("missing field 'ambient'");
    s.metric = parse_ambient(doc.at("ambient"), base_dir, ambient);
    s.resolved["ambient"] = ambient;

    const json flow = get<json>(doc, "", "flow", json::object());
    only_keys(flow, "flow", {"t0", "dt", "steps", "integrator", "reorthonormalize_every", "drift_limit", "record_every",
                             "sasaki_alpha"});
    const double t0 = get<double>(flow, "flow", "t0", 0.0);
    const double dt = positive(get<double>(flow, "flow", "dt", 1e-4), "flow.dt");
    const int steps = get<int>(flow, "flow", "steps", 0);
    if (steps < 0) throw ConfigError("'flow.steps' must be non-negative");
    Integrator integrator;
    try {
        integrator = integrator_from_string(get<std::string>(flow, "flow", "integrator", "rk4"));
    } catch (const Error& e) {
        throw ConfigError(std::string("'flow.integrator': ") + e.what());
    }
    s.reorthonormalize_every = get<int>(flow, "flow", "reorthonormalize_every", 100);
    s.drift_limit = positive(get<double>(flow, "flow", "drift_limit", 1e-6), "flow.drift_limit");
    s.record_every = positive(get<int>(flow, "flow", "record_every", 1), "flow.record_every");
    const double alpha = positive(get<double>(flow, "flow", "sasaki_alpha", 1.0), "flow.sasaki_alpha");
    s.resolved["flow"] = {{"t0", t0}, {"dt", dt}, {"steps", steps}, {"integrator", to_string(integrator)},
                          {"reorthonormalize_every", s.reorthonormalize_every}, {"drift_limit", s.drift_limit},
                          {"record_every", s.record_every}, {"sasaki_alpha", alpha}};

    if (doc.contains("immersion")) {
        const json& im = doc.at("immersion");
        const std::string ctx = "immersion";
        only_keys(im, ctx, {"kind", "params", "resolution", "stencil_order", "analytic", "neumann_edges", "path"});
        const std::string kind = require<std::string>(im, ctx, "kind");
        const int order = get<int>(im, ctx, "stencil_order", 2);
        if (order != 2 && order != 4) throw ConfigError("'immersion.stencil_order' must be 2 or 4");
        json ri = {{"kind", kind}, {"stencil_order", order}};
        if (kind == "mesh_csv") {
            if (im.contains("params") || im.contains("resolution") || im.contains("analytic"))
                throw ConfigError("a mesh_csv immersion takes only 'path', 'stencil_order' and 'neumann_edges'");
            const std::string path = resolve_path(require<std::string>(im, ctx, "path"), base_dir);
            s.mesh = read_mesh_csv(path, order);
            if (s.mesh->ambient_dim() != s.metric->dim())
                throw ConfigError("mesh ambient dimension " + std::to_string(s.mesh->ambient_dim()) +
                                  " does not match the metric dimension " + std::to_string(s.metric->dim()));
            ri["path"] = path;
            ri["resolution"] = s.mesh->grid().counts;
        } else {
            if (im.contains("path")) throw ConfigError("'immersion.path' applies to mesh_csv only");
            json rp;
            ParametrizationPtr param = make_catalog(kind, get<json>(im, ctx, "params", json::object()), rp);
            Problem p(s.id, *s.metric, param);
            const auto res = get<std::vector<int>>(im, ctx, "resolution", {64});
            const ParamDomain d = param->domain();
            if (int(res.size()) != d.dim)
                throw ConfigError("'immersion.resolution' needs " + std::to_string(d.dim) + " entries for '" + kind + "'");
            for (int a = 0; a < d.dim; ++a) {
                const int need = d.periodic[std::size_t(a)] ? 3 : order + 1;
                if (res[std::size_t(a)] < need) throw ConfigError("'immersion.resolution' is too coarse for the stencil");
                p.counts[std::size_t(a)] = res[std::size_t(a)];
            }
            p.stencil_order = order;
            p.analytic_jets = get<bool>(im, ctx, "analytic", false);
            p.neumann_edges = get<bool>(im, ctx, "neumann_edges", true);
            p.t0 = t0;
            p.dt = dt;
            p.steps = steps;
            p.integrator = integrator;
            p.sasaki.alpha = alpha;
            ri.update({{"params", rp}, {"resolution", res}, {"analytic", p.analytic_jets},
                       {"neumann_edges", p.neumann_edges}, {"ell", d.dim}, {"codimension", s.metric->dim() - d.dim}});
            s.problem = std::move(p);
        }
        s.resolved["immersion"] = ri;
    }

    const json checks = get<json>(doc, "", "checks", json::array());
    if (!checks.is_array()) throw ConfigError("'checks' must be an array");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < checks.size(); ++i) {
        CheckSpec c = parse_check(checks[i], i);
        if (!seen.insert(c.id).second) throw ConfigError("check '" + c.id + "' is declared twice");
        if (schema_of(c.id).needs_immersion && !s.has_immersion())
            throw ConfigError("check '" + c.id + "' needs an immersion");
        if (schema_of(c.id).needs_immersion && c.id != "frame_drift" && !s.problem)
            throw ConfigError("check '" + c.id + "' needs a catalog immersion");
        s.resolved["checks"].push_back({{"id", c.id}, {"tolerance", c.tolerance}, {"order_floor", c.order_floor},
                                        {"levels", c.levels}, {"first_level", c.first_level}, {"options", c.options}});
        s.checks.push_back(std::move(c));
    }
    if (!s.resolved.contains("checks")) s.resolved["checks"] = json::array();

    const json out = get<json>(doc, "", "output", json::object());
    only_keys(out, "output", {"dir", "timeseries"});
    s.out_dir = resolve_path(get<std::string>(out, "output", "dir", "out"), ".");
    s.timeseries = get<bool>(out, "output", "timeseries", true);
    s.resolved["output"] = {{"dir", s.out_dir}, {"timeseries", s.timeseries}};
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read scenario file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
    }
    Scenario s = parse_scenario(doc, fs::path(path).parent_path().string());
    s.source = path;
    return s;
}

// ============================================================================
// Preconditions

namespace {

int option_m(const CheckSpec& c, const MetricFamily& metric) {
    const int m = c.options.value("m", 1);
    if (m < 1 || m >= metric.dim())
        throw PreconditionError("check '" + c.id + "': subspace dimension m = " + std::to_string(m) +
                                " must lie in [1, " + std::to_string(metric.dim() - 1) + "]");
    return m;
}

void even_steps_at_all_levels(const CheckSpec& c, const Problem& p, int levels, int first) {
    for (int k = first; k < first + levels; ++k) {
        const Problem q = [&] {
            try {
                return p.refined(k);
            } catch (const UsageError& e) {
                throw PreconditionError("check '" + c.id + "': " + e.what());
            }
        }();
        if (q.steps < 2 || q.steps % 2 != 0)
            throw PreconditionError("check '" + c.id + "' needs an even step count of at least 2 at every level");
    }
}

}  // namespace

void validate_preconditions(const Scenario& s, std::optional<int> levels_override) {
    const MetricFamily& metric = s.ambient();
    for (const CheckSpec& c : s.checks) {
        const int levels = levels_override && is_refinable(c.id) ? *levels_override : c.levels;
        const int first = c.first_level;
        if (c.id == "connection_axioms" || c.id == "script_R_zero" || c.id == "script_R_components") {
            option_m(c, metric);
            if (c.options.value("samples", 1) < 1) throw ConfigError("check '" + c.id + "': samples must be positive");
            continue;
        }
        if (c.id == "frame_drift") {
            if (s.flow_steps() < 1) throw PreconditionError("check 'frame_drift' needs flow.steps >= 1");
            continue;
        }
        const Problem& p = *s.problem;
        if (c.id != "oracle_tension" && c.id != "ruh_vilms" && p.analytic_jets)
            throw PreconditionError("check '" + c.id + "' runs on a lattice mesh; set immersion.analytic = false");
        if (c.id == "ruh_vilms") {
            if (metric.kind() != MetricKind::euclidean)
                throw PreconditionError("check 'ruh_vilms' needs a euclidean ambient");
            for (int k = first; k < first + levels; ++k) {
                try {
                    (void)p.refined(k);
                } catch (const UsageError& e) {
                    throw PreconditionError(std::string("check 'ruh_vilms': ") + e.what());
                }
            }
        } else if (c.id == "main_identity" || c.id == "proof_chain") {
            if (!metric.solves_normalized_flow())
                throw PreconditionError("check '" + c.id + "' needs an ambient that solves the normalized metric flow");
            if (c.id == "main_identity") {
                even_steps_at_all_levels(c, p, levels, first);
                const int stride = c.options.value("time_stride", 1);
                if (stride < 1 || p.refined(first).steps / 2 < stride)
                    throw PreconditionError("check 'main_identity': time_stride must lie in [1, steps / 2]");
            }
        } else if (c.id == "radius_law") {
            if (metric.kind() != MetricKind::euclidean)
                throw PreconditionError("check 'radius_law' needs a euclidean ambient");
            const std::string kind = s.resolved.at("immersion").at("kind");
            if (kind != "circle" && kind != "sphere")
                throw PreconditionError("check 'radius_law' needs a circle or sphere immersion");
            const double fraction = c.options.value("fraction", 0.4);
            if (!(fraction > 0.0 && fraction < 1.0)) throw ConfigError("check 'radius_law': fraction must lie in (0, 1)");
        } else if (c.id == "subsolution") {
            if (metric.kind() != MetricKind::flat_torus)
                throw PreconditionError("check 'subsolution' needs a flat torus ambient");
            const int m = metric.dim() - p.ell();
            if (m != 1)
                throw PreconditionError("check 'subsolution' needs codimension 1 (the scenario has m = " +
                                        std::to_string(m) + ")");
            even_steps_at_all_levels(c, p, levels, first);
        } else if (c.id == "variational_field") {
            if (!c.options.contains("dts") || !c.options["dts"].is_array() || c.options["dts"].empty())
                throw ConfigError("check 'variational_field' needs a non-empty 'dts' list");
        }
    }
}

std::vector<std::string> scenario_files(const std::string& dir) {
    std::vector<std::string> files;
    std::error_code ec;
    for (const auto& e : fs::directory_iterator(dir, ec))
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path().string());
    if (ec) throw IoError("cannot list scenario directory '" + dir + "': " + ec.message());
    std::sort(files.begin(), files.end());
    return files;
}

}  // namespace gaussflow
