// ambient.hpp - time-dependent metrics on coordinate charts and their curvature.
//
// Index conventions
//   christoffel   G(k, i, j)   = Gamma^k_ij
//   riemann       R(a, b, c, d) = R^a_bcd, with (R(X,Y)Z)^a = R^a_bcd Z^b X^c Y^d
//                 and R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y]
//   ricci         Ric_bd = R^a_bad
//   metric jets   dg(k, i, j) = d_k g_ij,  d2g(k, l, i, j) = d_k d_l g_ij stored
//                 as a vector of Array3 indexed by k.

#pragma once

#include "gaussflow/errors.hpp"
#include "gaussflow/linalg.hpp"

#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace gaussflow {

struct ChartPoint {
    Vec coords;
    int chart_id = 0;

    ChartPoint() = default;
    explicit ChartPoint(Vec x, int chart = 0) : coords(std::move(x)), chart_id(chart) {}
    int dim() const { return int(coords.size()); }
};

// Coordinate box of one chart. Periodic directions wrap with period hi - lo.
struct DomainBox {
    Vec lo, hi;
    std::vector<bool> periodic;

    bool contains(const Vec& x) const;
};

struct MetricJet {
    Mat g;
    Array3 dg;               // valid when order >= 1
    std::vector<Array3> d2g; // valid when order >= 2; d2g[k](l, i, j)
    int order = 0;
};

// Static reference metric g0 on one or more charts.
class ReferenceMetric {
public:
    virtual ~ReferenceMetric() = default;

    virtual int dim() const = 0;
    virtual int chart_count() const { return 1; }
    virtual DomainBox domain(int chart) const = 0;
    virtual MetricJet jet(const ChartPoint& x, int order) const = 0;

    // Moves x to the fundamental domain and, on multi-chart manifolds, to the
    // chart where it is well inside the domain.
    virtual ChartPoint canonicalize(const ChartPoint& x) const;

    // Coordinates of the same point in another chart.
    virtual ChartPoint transition(const ChartPoint& x, int chart) const;
};

// Point of the unit sphere in R^{n+1} for a chart point of a round-sphere
// reference metric (either chart).
Vec sphere_embedding(const ReferenceMetric& sphere, const ChartPoint& x);

enum class MetricKind {
    euclidean,
    flat_torus,
    round_sphere,
    hyperbolic,
    product_spheres,
    warped_product,
    grid_sampled,
};

std::string to_string(MetricKind kind);
MetricKind metric_kind_from_string(const std::string& name);

// A block of coordinates scaled by c_b(t), where Ric(g0) = lambda * g0 on the
// block. The family solves dg/dt = -Ric + f g via c' = -lambda + f c.
struct ScaleBlock {
    int begin = 0;
    int end = 0;
    double lambda = 0.0;
    double c0 = 1.0;
};

// Lattice of metric samples for the grid_sampled family.
struct GridTable {
    int dim = 0;
    std::vector<int> counts;
    Vec lo, hi;
    std::vector<bool> periodic;
    // Node-major storage of the symmetric components: node index (last axis
    // fastest), then the upper triangle row by row.
    std::vector<double> components;

    int node_count() const;
    double spacing(int axis) const;
    static int packed_size(int n) { return n * (n + 1) / 2; }
};

// Samples g0 of a reference metric on a lattice covering `box`.
GridTable sample_reference(const ReferenceMetric& ref, const DomainBox& box, const std::vector<int>& counts,
                           int chart = 0);
GridTable read_grid_csv(const std::string& path);
GridTable read_grid_binary(const std::string& path);
void write_grid_csv(const GridTable& table, const std::string& path);
void write_grid_binary(const GridTable& table, const std::string& path);

// Profile w(x0) = w0 + w1 x0 + w2 x0^2 of g = dx0^2 + w(x0)^2 (dx1^2 + ...).
struct WarpProfile {
    double w0 = 1.0;
    double w1 = 0.0;
    double w2 = 0.0;
};

class MetricFamily {
public:
    static MetricFamily euclidean(int n, double f = 0.0);
    static MetricFamily flat_torus(int n, double period = 2.0 * 3.14159265358979323846, double f = 0.0);
    static MetricFamily round_sphere(int n, double radius, double f = 0.0);
    static MetricFamily hyperbolic(int n, double scale, double f = 0.0);
    static MetricFamily product_spheres(double r1, double r2, double f = 0.0);
    static MetricFamily warped_product(int n, const WarpProfile& profile);
    static MetricFamily grid_sampled(const GridTable& table);

    MetricKind kind() const { return kind_; }
    int dim() const { return ref_->dim(); }
    const ReferenceMetric& reference() const { return *ref_; }
    const std::vector<ScaleBlock>& blocks() const { return blocks_; }
    double normalization() const { return f_; }

    // True when the family is an exact solution of dg/dt = -Ric + f g.
    bool solves_normalized_flow() const { return solves_flow_; }

    // Supremum of the time domain [0, T): first time a scale reaches zero.
    double time_horizon() const;

    double scale(int block, double t) const;
    double scale_rate(int block, double t) const;
    std::vector<double> scales(double t) const;
    int block_of(int index) const;

    void check_time(double t) const;
    void check_point(const ChartPoint& x) const;
    ChartPoint canonicalize(const ChartPoint& x) const { return ref_->canonicalize(x); }

    // Coordinate difference to - from, wrapped to the nearest periodic image.
    Vec displacement(const ChartPoint& from, const ChartPoint& to) const;

    // Grid spacing for grid_sampled, 0 otherwise.
    double lattice_spacing() const { return lattice_spacing_; }

    // Step of the central time difference used when no closed-form rate exists.
    static constexpr double kTimeStep = 1e-5;

private:
    MetricFamily() = default;
    void cache_domains();

    MetricKind kind_ = MetricKind::euclidean;
    std::shared_ptr<const ReferenceMetric> ref_;
    std::vector<ScaleBlock> blocks_;
    double f_ = 0.0;
    bool solves_flow_ = false;
    bool has_rate_ = true;
    double lattice_spacing_ = 0.0;
    std::vector<DomainBox> boxes_;  // per chart, for displacement
};

// Metric jet of g_t including the block scales.
MetricJet metric_jet(const MetricFamily& m, const ChartPoint& x, double t, int order);

Mat eval_metric(const MetricFamily& m, const ChartPoint& x, double t);
Array3 christoffel(const MetricFamily& m, const ChartPoint& x, double t);
Array4 riemann_tensor(const MetricFamily& m, const ChartPoint& x, double t);
Mat ricci_tensor(const MetricFamily& m, const ChartPoint& x, double t);
Mat metric_time_derivative(const MetricFamily& m, const ChartPoint& x, double t);

// Metric, inverse and Christoffel symbols: enough for covariant derivatives.
struct ConnectionData {
    Mat metric;
    Mat inverse;
    Array3 christoffel;
};

ConnectionData connection(const MetricFamily& m, const ChartPoint& x, double t);

struct CurvatureData {
    Mat metric;
    Mat inverse;
    Array3 christoffel;
    Array4 riemann;
    Mat ricci;
    ChartPoint evaluated_at;
    double time = 0.0;

    // L(a, b, c, d) = g_ae R^e_bcd, so g(R(X,Y)Z, W) = L_abcd W^a Z^b X^c Y^d.
    Array4 lowered() const;
};

CurvatureData curvature(const MetricFamily& m, const ChartPoint& x, double t);

// Curvature from a metric jet of order 2 (shared by all families).
CurvatureData curvature_from_jet(const MetricJet& jet);

// R(X,Y)Z. The (X,Y) slot is antisymmetrized explicitly, so R(X,X)Z is
// exactly zero in floating point.
Vec apply_riemann(const Array4& riemann, const Vec& X, const Vec& Y, const Vec& Z);

// Gamma(X, Y)^k = Gamma^k_ij X^i Y^j.
Vec contract_christoffel(const Array3& gamma, const Vec& X, const Vec& Y);

// Geodesic from x with initial velocity v over unit parameter length,
// transporting the columns of `vectors` in parallel. Fixed-step RK4.
struct TransportResult {
    ChartPoint end;
    Vec velocity;
    Mat transported;
};

TransportResult geodesic_transport(const MetricFamily& m, double t, const ChartPoint& x, const Vec& v,
                                   const Mat& vectors, int steps = 8);

}  // namespace gaussflow
