// grid_sampled.cpp - metric tables on a lattice with finite-difference derivatives.

#include "reference_metrics.hpp"

#include "gaussflow/fd.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace gaussflow {

int GridTable::node_count() const {
    int total = 1;
    for (int c : counts) total *= c;
    return total;
}

double GridTable::spacing(int axis) const {
    const double span = hi[axis] - lo[axis];
    return periodic[axis] ? span / counts[axis] : span / (counts[axis] - 1);
}

namespace {

void validate(const GridTable& t) {
    if (t.dim < 1 || t.dim > 4) throw ConfigError("grid table dimension must be 1..4");
    if (int(t.counts.size()) != t.dim || t.lo.size() != t.dim || t.hi.size() != t.dim ||
        int(t.periodic.size()) != t.dim)
        throw ConfigError("grid table shape header is inconsistent");
    for (int a = 0; a < t.dim; ++a) {
        if (t.counts[a] < 3) throw ConfigError("grid table needs at least 3 nodes per axis");
        if (!(t.hi[a] > t.lo[a])) throw ConfigError("grid table box is empty");
    }
    const std::size_t expected = std::size_t(t.node_count()) * GridTable::packed_size(t.dim);
    if (t.components.size() != expected)
        throw ConfigError("grid table has " + std::to_string(t.components.size()) + " values, expected " +
                          std::to_string(expected));
}

int packed_index(int n, int i, int j) {
    if (i > j) std::swap(i, j);
    return i * n - i * (i - 1) / 2 + (j - i);
}

class GridMetric : public ReferenceMetric {
public:
    explicit GridMetric(const GridTable& table) : t_(table) {
        validate(t_);
        n_ = t_.dim;
        P_ = GridTable::packed_size(n_);
        strides_.assign(n_, 1);
        for (int a = n_ - 2; a >= 0; --a) strides_[a] = strides_[a + 1] * t_.counts[a + 1];
        build_derivatives();
    }

    int dim() const override { return n_; }

    DomainBox domain(int) const override {
        DomainBox box;
        box.lo = t_.lo;
        box.hi = t_.hi;
        box.periodic = t_.periodic;
        return box;
    }

    MetricJet jet(const ChartPoint& x, int order) const override {
        if (x.dim() != n_) throw UsageError("chart point has wrong dimension");
        // Multilinear weights over the 2^n surrounding lattice nodes.
        std::vector<int> base(n_);
        std::vector<double> frac(n_);
        for (int a = 0; a < n_; ++a) {
            const double h = t_.spacing(a);
            double s = (x.coords[a] - t_.lo[a]) / h;
            if (t_.periodic[a]) {
                const double period = t_.counts[a];
                s = std::fmod(s, period);
                if (s < 0) s += period;
                base[a] = std::min(int(std::floor(s)), t_.counts[a] - 1);
            } else {
                if (s < -1e-12 || s > t_.counts[a] - 1 + 1e-12) throw DomainError("point outside sampled lattice");
                base[a] = std::clamp(int(std::floor(s)), 0, t_.counts[a] - 2);
            }
            frac[a] = s - base[a];
        }
        MetricJet out;
        out.order = order;
        out.g = Mat::Zero(n_, n_);
        if (order >= 1) out.dg = Array3(n_);
        if (order >= 2) out.d2g.assign(n_, Array3(n_));
        const int corners = 1 << n_;
        for (int c = 0; c < corners; ++c) {
            double w = 1.0;
            int node = 0;
            for (int a = 0; a < n_; ++a) {
                const int bit = (c >> a) & 1;
                w *= bit ? frac[a] : 1.0 - frac[a];
                int idx = base[a] + bit;
                if (t_.periodic[a]) idx %= t_.counts[a];
                node += idx * strides_[a];
            }
            if (w == 0.0) continue;
            for (int i = 0; i < n_; ++i)
                for (int j = 0; j < n_; ++j) {
                    const int p = packed_index(n_, i, j);
                    out.g(i, j) += w * t_.components[std::size_t(node) * P_ + p];
                    if (order >= 1)
                        for (int k = 0; k < n_; ++k) out.dg(k, i, j) += w * dg_[(std::size_t(node) * n_ + k) * P_ + p];
                    if (order >= 2)
                        for (int k = 0; k < n_; ++k)
                            for (int l = 0; l < n_; ++l)
                                out.d2g[k](l, i, j) += w * d2g_[((std::size_t(node) * n_ + k) * n_ + l) * P_ + p];
                }
        }
        return out;
    }

    ChartPoint canonicalize(const ChartPoint& x) const override { return ReferenceMetric::canonicalize(x); }

private:
    // Derivative along `axis` of a nodal field with `width` values per node.
    std::vector<double> differentiate(const std::vector<double>& field, int width, int axis, int deriv) const {
        const int N = t_.node_count();
        std::vector<double> out(std::size_t(N) * width, 0.0);
        const double h = t_.spacing(axis);
        const double scale = deriv == 1 ? 1.0 / h : 1.0 / (h * h);
        for (int node = 0; node < N; ++node) {
            const int i = (node / strides_[axis]) % t_.counts[axis];
            Stencil s;
            if (t_.periodic[axis]) {
                s = central_stencil(deriv, 2);
            } else {
                s = fitted_stencil(deriv, 2, i, t_.counts[axis] - 1 - i);
            }
            for (std::size_t k = 0; k < s.offsets.size(); ++k) {
                int j = i + s.offsets[k];
                if (t_.periodic[axis]) j = ((j % t_.counts[axis]) + t_.counts[axis]) % t_.counts[axis];
                const int other = node + (j - i) * strides_[axis];
                const double w = s.weights[k] * scale;
                for (int c = 0; c < width; ++c) out[std::size_t(node) * width + c] += w * field[std::size_t(other) * width + c];
            }
        }
        return out;
    }

    void build_derivatives() {
        const int N = t_.node_count();
        dg_.assign(std::size_t(N) * n_ * P_, 0.0);
        d2g_.assign(std::size_t(N) * n_ * n_ * P_, 0.0);
        std::vector<std::vector<double>> first(n_);
        for (int k = 0; k < n_; ++k) {
            first[k] = differentiate(t_.components, P_, k, 1);
            for (int node = 0; node < N; ++node)
                for (int p = 0; p < P_; ++p) dg_[(std::size_t(node) * n_ + k) * P_ + p] = first[k][std::size_t(node) * P_ + p];
        }
        for (int k = 0; k < n_; ++k)
            for (int l = 0; l < n_; ++l) {
                const std::vector<double> second =
                    k == l ? differentiate(t_.components, P_, k, 2) : differentiate(first[k], P_, l, 1);
                for (int node = 0; node < N; ++node)
                    for (int p = 0; p < P_; ++p)
                        d2g_[((std::size_t(node) * n_ + k) * n_ + l) * P_ + p] = second[std::size_t(node) * P_ + p];
            }
        // Symmetrize the mixed second derivatives.
        for (int node = 0; node < N; ++node)
            for (int k = 0; k < n_; ++k)
                for (int l = k + 1; l < n_; ++l)
                    for (int p = 0; p < P_; ++p) {
                        double& a = d2g_[((std::size_t(node) * n_ + k) * n_ + l) * P_ + p];
                        double& b = d2g_[((std::size_t(node) * n_ + l) * n_ + k) * P_ + p];
                        a = b = 0.5 * (a + b);
                    }
    }

    GridTable t_;
    int n_ = 0;
    int P_ = 0;
    std::vector<int> strides_;
    std::vector<double> dg_;
    std::vector<double> d2g_;
};

template <class T>
void write_pod(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_pod(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw IoError("truncated binary grid table");
    return v;
}

constexpr char kBinaryMagic[8] = {'G', 'F', 'G', 'R', 'I', 'D', '1', '\0'};

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

}  // namespace

std::shared_ptr<const ReferenceMetric> make_grid_metric(const GridTable& table) {
    return std::make_shared<GridMetric>(table);
}

GridTable sample_reference(const ReferenceMetric& ref, const DomainBox& box, const std::vector<int>& counts, int chart) {
    GridTable t;
    t.dim = ref.dim();
    t.counts = counts;
    t.lo = box.lo;
    t.hi = box.hi;
    t.periodic = box.periodic;
    const int n = t.dim;
    const int P = GridTable::packed_size(n);
    t.components.assign(std::size_t(t.node_count()) * P, 0.0);
    std::vector<int> idx(n, 0);
    for (int node = 0; node < t.node_count(); ++node) {
        int rem = node;
        for (int a = n - 1; a >= 0; --a) {
            idx[a] = rem % counts[a];
            rem /= counts[a];
        }
        Vec x(n);
        for (int a = 0; a < n; ++a) x[a] = t.lo[a] + idx[a] * t.spacing(a);
        const Mat g = ref.jet(ChartPoint(x, chart), 0).g;
        int p = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) t.components[std::size_t(node) * P + p++] = g(i, j);
    }
    return t;
}

void write_grid_csv(const GridTable& t, const std::string& path) {
    validate(t);
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path);
    os.precision(17);
    os << "# gaussflow.grid/1\n";
    os << "dim," << t.dim << "\n";
    os << "counts";
    for (int c : t.counts) os << "," << c;
    os << "\nlo";
    for (int a = 0; a < t.dim; ++a) os << "," << t.lo[a];
    os << "\nhi";
    for (int a = 0; a < t.dim; ++a) os << "," << t.hi[a];
    os << "\nperiodic";
    for (int a = 0; a < t.dim; ++a) os << "," << (t.periodic[a] ? 1 : 0);
    os << "\n";
    const int P = GridTable::packed_size(t.dim);
    bool first = true;
    for (int i = 0; i < t.dim; ++i)
        for (int j = i; j < t.dim; ++j) {
            os << (first ? "" : ",") << "g" << i << j;
            first = false;
        }
    os << "\n";
    for (int node = 0; node < t.node_count(); ++node) {
        for (int p = 0; p < P; ++p) os << (p ? "," : "") << t.components[std::size_t(node) * P + p];
        os << "\n";
    }
}

GridTable read_grid_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path);
    GridTable t;
    std::string line;
    auto next_fields = [&](const char* key) {
        while (std::getline(is, line)) {
            if (line.empty() || line[0] == '#') continue;
            auto f = split_csv(line);
            if (f.empty() || f[0] != key) throw ConfigError(std::string("grid CSV: expected '") + key + "' row");
            f.erase(f.begin());
            return f;
        }
        throw ConfigError(std::string("grid CSV: missing '") + key + "' row");
    };
    try {
        t.dim = std::stoi(next_fields("dim").at(0));
        for (const auto& s : next_fields("counts")) t.counts.push_back(std::stoi(s));
        auto lo = next_fields("lo");
        auto hi = next_fields("hi");
        auto per = next_fields("periodic");
        t.lo.resize(lo.size());
        t.hi.resize(hi.size());
        for (std::size_t a = 0; a < lo.size(); ++a) t.lo[a] = std::stod(lo[a]);
        for (std::size_t a = 0; a < hi.size(); ++a) t.hi[a] = std::stod(hi[a]);
        for (const auto& s : per) t.periodic.push_back(std::stoi(s) != 0);
        std::getline(is, line);  // component names
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            for (const auto& s : split_csv(line)) t.components.push_back(std::stod(s));
        }
    } catch (const std::invalid_argument&) {
        throw ConfigError("grid CSV: malformed number in " + path);
    } catch (const std::out_of_range&) {
        throw ConfigError("grid CSV: malformed header in " + path);
    }
    validate(t);
    return t;
}

void write_grid_binary(const GridTable& t, const std::string& path) {
    validate(t);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path);
    os.write(kBinaryMagic, sizeof(kBinaryMagic));
    write_pod<std::int32_t>(os, t.dim);
    for (int c : t.counts) write_pod<std::int32_t>(os, c);
    for (int a = 0; a < t.dim; ++a) write_pod<double>(os, t.lo[a]);
    for (int a = 0; a < t.dim; ++a) write_pod<double>(os, t.hi[a]);
    for (int a = 0; a < t.dim; ++a) write_pod<std::uint8_t>(os, t.periodic[a] ? 1 : 0);
    os.write(reinterpret_cast<const char*>(t.components.data()), std::streamsize(t.components.size() * sizeof(double)));
}

GridTable read_grid_binary(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kBinaryMagic, 8) != 0) throw ConfigError("not a binary grid table: " + path);
    GridTable t;
    t.dim = read_pod<std::int32_t>(is);
    if (t.dim < 1 || t.dim > 4) throw ConfigError("grid table dimension must be 1..4");
    for (int a = 0; a < t.dim; ++a) t.counts.push_back(read_pod<std::int32_t>(is));
    t.lo.resize(t.dim);
    t.hi.resize(t.dim);
    for (int a = 0; a < t.dim; ++a) t.lo[a] = read_pod<double>(is);
    for (int a = 0; a < t.dim; ++a) t.hi[a] = read_pod<double>(is);
    for (int a = 0; a < t.dim; ++a) t.periodic.push_back(read_pod<std::uint8_t>(is) != 0);
    t.components.resize(std::size_t(t.node_count()) * GridTable::packed_size(t.dim));
    is.read(reinterpret_cast<char*>(t.components.data()), std::streamsize(t.components.size() * sizeof(double)));
    if (!is) throw IoError("truncated binary grid table");
    validate(t);
    return t;
}

}  // namespace gaussflow
