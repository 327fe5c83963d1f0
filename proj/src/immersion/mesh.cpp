// mesh.cpp - parameter lattices, analytic and mesh immersions, node tables.

#include "gaussflow/immersion.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace gaussflow {

// ============================================================================
// Parameter lattice

ParamGrid ParamGrid::over(const ParamDomain& domain, int n0, int n1) {
    if (domain.dim < 1 || domain.dim > 2) throw UsageError("parameter domains have dimension 1 or 2");
    ParamGrid g;
    g.domain = domain;
    g.counts = {n0, domain.dim == 2 ? n1 : 1};
    for (int a = 0; a < domain.dim; ++a) {
        if (g.counts[a] < 3) throw UsageError("parameter lattice needs at least 3 nodes per axis");
        if (!(domain.hi[a] > domain.lo[a])) throw UsageError("parameter domain is empty");
    }
    return g;
}

double ParamGrid::spacing(int axis) const {
    const double span = domain.hi[axis] - domain.lo[axis];
    return domain.periodic[axis] ? span / counts[axis] : span / (counts[axis] - 1);
}

Vec ParamGrid::param(int node) const {
    const auto idx = index(node);
    Vec u(dim());
    for (int a = 0; a < dim(); ++a) u[a] = domain.lo[a] + idx[a] * spacing(a);
    return u;
}

int ParamGrid::shifted(int node, int axis, int k) const {
    auto idx = index(node);
    int i = idx[axis] + k;
    if (domain.periodic[axis]) {
        i %= counts[axis];
        if (i < 0) i += counts[axis];
    } else if (i < 0 || i >= counts[axis]) {
        return -1;
    }
    idx[axis] = i;
    return this->node(idx[0], idx[1]);
}

// ============================================================================
// Analytic immersion

AnalyticImmersion::AnalyticImmersion(ParametrizationPtr param, ParamGrid grid, double delta, int order)
    : param_(std::move(param)), grid_(std::move(grid)), delta_(delta), order_(order) {
    if (!param_) throw UsageError("analytic immersion needs a parametrization");
    if (grid_.dim() != param_->domain().dim) throw UsageError("lattice and parametrization dimensions differ");
    if (!(delta_ > 0.0)) throw UsageError("difference step must be positive");
}

ImmersionJet AnalyticImmersion::jet(const MetricFamily&, int node) const { return param_->jet(grid_.param(node)); }

std::vector<WeightedJet> AnalyticImmersion::derivative_jets(const MetricFamily&, int node, int axis) const {
    const Stencil s = central_stencil(1, order_);
    const Vec u = grid_.param(node);
    std::vector<WeightedJet> out;
    for (std::size_t k = 0; k < s.offsets.size(); ++k) {
        if (s.weights[k] == 0.0) continue;
        Vec uk = u;
        uk[axis] += s.offsets[k] * delta_;
        out.push_back(WeightedJet{-1, s.weights[k] / delta_, param_->jet(uk)});
    }
    return out;
}

// ============================================================================
// Mesh immersion

ImmersionMesh::ImmersionMesh(ParamGrid grid, std::vector<ChartPoint> values, int ambient_dim, int stencil_order)
    : grid_(std::move(grid)), values_(std::move(values)), n_(ambient_dim), order_(stencil_order) {
    if (order_ != 2 && order_ != 4) throw UsageError("mesh stencil order must be 2 or 4");
    if (int(values_.size()) != grid_.node_count()) throw UsageError("mesh: node count does not match the lattice");
    for (const ChartPoint& x : values_)
        if (x.dim() != n_) throw UsageError("mesh: node value has wrong dimension");
    if (grid_.dim() >= n_) throw UsageError("mesh: parameter dimension must be below the ambient dimension");
    auto table = std::make_shared<std::vector<NodeStencil>>(std::size_t(grid_.node_count() * grid_.dim() * 2));
    for (int v = 0; v < grid_.node_count(); ++v)
        for (int a = 0; a < grid_.dim(); ++a)
            for (int d = 1; d <= 2; ++d) {
                try {
                    (*table)[std::size_t((v * grid_.dim() + a) * 2 + d - 1)] = build_stencil(v, a, d);
                } catch (const StencilError&) {
                }
            }
    stencils_ = std::move(table);
}

ImmersionMesh ImmersionMesh::sample(const Parametrization& param, const ParamGrid& grid, int stencil_order) {
    std::vector<ChartPoint> values;
    values.reserve(std::size_t(grid.node_count()));
    for (int v = 0; v < grid.node_count(); ++v) values.push_back(param.value(grid.param(v)));
    return ImmersionMesh(grid, std::move(values), param.ambient_dim(), stencil_order);
}

const ImmersionMesh::NodeStencil& ImmersionMesh::stencil(int node, int axis, int deriv) const {
    if (node < 0 || node >= grid_.node_count() || axis < 0 || axis >= grid_.dim() || deriv < 1 || deriv > 2)
        throw UsageError("mesh stencil: index out of range");
    const NodeStencil& s = (*stencils_)[std::size_t((node * grid_.dim() + axis) * 2 + deriv - 1)];
    if (s.nodes.empty()) {
        build_stencil(node, axis, deriv);  // rethrows the fitting error
        throw StencilError("mesh stencil unavailable");
    }
    return s;
}

ImmersionMesh::NodeStencil ImmersionMesh::build_stencil(int node, int axis, int deriv) const {
    const auto idx = grid_.index(node);
    Stencil s;
    if (grid_.domain.periodic[axis]) {
        s = central_stencil(deriv, order_);
    } else {
        s = fitted_stencil(deriv, order_, idx[axis], grid_.counts[axis] - 1 - idx[axis]);
    }
    const double h = grid_.spacing(axis);
    const double scale = deriv == 1 ? 1.0 / h : 1.0 / (h * h);
    NodeStencil out;
    for (std::size_t k = 0; k < s.offsets.size(); ++k) {
        if (s.weights[k] == 0.0) continue;
        const int nb = grid_.shifted(node, axis, s.offsets[k]);
        if (nb < 0) throw StencilError("mesh stencil leaves the lattice");
        out.nodes.push_back(nb);
        out.weights.push_back(s.weights[k] * scale);
    }
    return out;
}

ImmersionJet ImmersionMesh::jet(const MetricFamily& metric, int node) const {
    const int l = grid_.dim();
    const ChartPoint& x0 = values_[std::size_t(node)];
    ImmersionJet out;
    out.point = x0;
    out.d1 = Mat::Zero(n_, l);
    out.d2.assign(std::size_t(l * l), Vec::Zero(n_));
    auto disp = [&](int nb) { return metric.displacement(x0, values_[std::size_t(nb)]); };
    for (int a = 0; a < l; ++a) {
        const NodeStencil& s1 = stencil(node, a, 1);
        for (std::size_t k = 0; k < s1.nodes.size(); ++k) out.d1.col(a) += s1.weights[k] * disp(s1.nodes[k]);
        const NodeStencil& s2 = stencil(node, a, 2);
        Vec acc = Vec::Zero(n_);
        for (std::size_t k = 0; k < s2.nodes.size(); ++k) acc += s2.weights[k] * disp(s2.nodes[k]);
        out.d2[std::size_t(a * l + a)] = acc;
    }
    if (l == 2) {
        const NodeStencil& s0 = stencil(node, 0, 1);
        Vec acc = Vec::Zero(n_);
        for (std::size_t k = 0; k < s0.nodes.size(); ++k) {
            const NodeStencil& s1 = stencil(s0.nodes[k], 1, 1);
            for (std::size_t j = 0; j < s1.nodes.size(); ++j) acc += s0.weights[k] * s1.weights[j] * disp(s1.nodes[j]);
        }
        out.d2[1] = acc;
        out.d2[2] = acc;
    }
    return out;
}

std::vector<WeightedJet> ImmersionMesh::derivative_jets(const MetricFamily& metric, int node, int axis) const {
    const NodeStencil s = stencil(node, axis, 1);
    std::vector<WeightedJet> out;
    for (std::size_t k = 0; k < s.nodes.size(); ++k) out.push_back(WeightedJet{s.nodes[k], s.weights[k], jet(metric, s.nodes[k])});
    return out;
}

double ImmersionMesh::seam_ratio(const MetricFamily& metric) const {
    double worst = 0.0;
    for (int a = 0; a < grid_.dim(); ++a) {
        if (!grid_.domain.periodic[a]) continue;
        double typical = 0.0, seam = 0.0;
        int count = 0;
        for (int v = 0; v < grid_.node_count(); ++v) {
            const int nb = grid_.shifted(v, a, 1);
            const double step = metric.displacement(values_[std::size_t(v)], values_[std::size_t(nb)]).norm();
            if (grid_.index(v)[a] == grid_.counts[a] - 1) {
                seam = std::max(seam, step);
            } else {
                typical += step;
                ++count;
            }
        }
        typical /= std::max(count, 1);
        if (typical > 0.0) worst = std::max(worst, seam / typical);
    }
    return worst;
}

// ============================================================================
// Node tables

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

double to_double(const std::string& s, const std::string& path) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == 0) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw IoError("mesh table " + path + ": bad number '" + s + "'");
    }
}

}  // namespace

ImmersionMesh read_mesh_csv(const std::string& path, int stencil_order) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open mesh table " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("# gaussflow.mesh/1", 0) != 0)
        throw IoError("mesh table " + path + ": missing '# gaussflow.mesh/1' header");
    ParamDomain domain;
    int n = 0, chart = 0;
    std::array<int, 2> counts{1, 1};
    const char* keys[] = {"dim", "ambient", "chart", "counts", "lo", "hi", "periodic"};
    for (const char* key : keys) {
        if (!std::getline(in, line)) throw IoError("mesh table " + path + ": truncated header");
        const auto f = split_csv(line);
        if (f.empty() || f[0] != key) throw IoError("mesh table " + path + ": expected row '" + key + "'");
        auto field = [&](std::size_t i) {
            if (i >= f.size()) throw IoError("mesh table " + path + ": row '" + key + "' too short");
            return to_double(f[i], path);
        };
        const std::string k = key;
        if (k == "dim") domain.dim = int(field(1));
        if (k == "ambient") n = int(field(1));
        if (k == "chart") chart = int(field(1));
        for (int a = 0; a < domain.dim && k != "dim" && k != "ambient" && k != "chart"; ++a) {
            if (k == "counts") counts[a] = int(field(1 + a));
            if (k == "lo") domain.lo[a] = field(1 + a);
            if (k == "hi") domain.hi[a] = field(1 + a);
            if (k == "periodic") domain.periodic[a] = field(1 + a) != 0.0;
        }
    }
    if (domain.dim < 1 || domain.dim > 2 || n < 2 || n > 4) throw IoError("mesh table " + path + ": bad dimensions");
    const ParamGrid grid = ParamGrid::over(domain, counts[0], counts[1]);
    std::vector<ChartPoint> values;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto f = split_csv(line);
        if (int(f.size()) != n) throw IoError("mesh table " + path + ": node row has wrong length");
        Vec x(n);
        for (int a = 0; a < n; ++a) x[a] = to_double(f[std::size_t(a)], path);
        values.emplace_back(x, chart);
    }
    if (int(values.size()) != grid.node_count()) throw IoError("mesh table " + path + ": node count mismatch");
    return ImmersionMesh(grid, std::move(values), n, stencil_order);
}

void write_mesh_csv(const ImmersionMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write mesh table " + path);
    const ParamGrid& g = mesh.grid();
    out << "# gaussflow.mesh/1\n";
    out << "dim," << g.dim() << "\nambient," << mesh.ambient_dim() << "\nchart,"
        << (mesh.values().empty() ? 0 : mesh.values()[0].chart_id) << "\n";
    out << std::setprecision(17);
    auto row = [&](const char* key, auto get) {
        out << key;
        for (int a = 0; a < g.dim(); ++a) out << ',' << get(a);
        out << '\n';
    };
    row("counts", [&](int a) { return g.counts[a]; });
    row("lo", [&](int a) { return g.domain.lo[a]; });
    row("hi", [&](int a) { return g.domain.hi[a]; });
    row("periodic", [&](int a) { return g.domain.periodic[a] ? 1 : 0; });
    for (const ChartPoint& x : mesh.values()) {
        for (int a = 0; a < x.dim(); ++a) out << (a ? "," : "") << x.coords[a];
        out << '\n';
    }
}

}  // namespace gaussflow
