// grassmann.hpp - points, tangent vectors and the Sasaki geometry of G_m(TN).
//
// A point stores an orthonormal frame of W (m columns) and of its orthogonal
// complement (l = n - m columns) in chart components at the base point. A
// vertical vector is a homomorphism W -> W-perp with coefficients B(i, a)
// relative to those frames: v_i maps to sum_a B(i, a) w_a.

#pragma once

#include "gaussflow/ambient.hpp"
#include "gaussflow/fd.hpp"

#include <functional>
#include <map>
#include <vector>

namespace gaussflow {

struct SasakiConfig {
    double alpha = 1.0;
};

struct GrassmannPoint {
    ChartPoint base;
    double time = 0.0;
    Mat frame_W;
    Mat frame_Wperp;

    int n() const { return int(frame_W.rows()); }
    int m() const { return int(frame_W.cols()); }
    int l() const { return int(frame_Wperp.cols()); }

    // Orthonormalizes `spanning` (n x m) under g_t(base) and completes it.
    static GrassmannPoint from_span(const MetricFamily& metric, const ChartPoint& base, double t, const Mat& spanning);

    // Largest deviation of the combined frame from g-orthonormality.
    double frame_residual(const MetricFamily& metric) const;
};

struct VerticalHom {
    Mat coeffs;  // m x l

    VerticalHom() = default;
    explicit VerticalHom(Mat b) : coeffs(std::move(b)) {}
    static VerticalHom zero(int m, int l) { return VerticalHom(Mat::Zero(m, l)); }
};

// Fiber metric k(B, B') = sum B(i,a) B'(i,a).
double fiber_inner(const VerticalHom& a, const VerticalHom& b);

struct BundleVector {
    GrassmannPoint point;
    Vec horizontal;
    VerticalHom vertical;
};

BundleVector operator+(const BundleVector& x, const BundleVector& y);
BundleVector operator-(const BundleVector& x, const BundleVector& y);
BundleVector operator*(double s, const BundleVector& x);

bool same_attachment(const GrassmannPoint& p, const GrassmannPoint& q, double tol = 1e-12);

// g(X^, Y^) + alpha k(X^v, Y^v). Throws UsageError if attached to different points.
double sasaki_inner(const MetricFamily& metric, const BundleVector& x, const BundleVector& y, const SasakiConfig& cfg);
double sasaki_norm(const MetricFamily& metric, const BundleVector& x, const SasakiConfig& cfg);

// Re-frames W by rot_W (m x m) and W-perp by rot_perp (l x l), both orthogonal.
GrassmannPoint reframe(const GrassmannPoint& p, const Mat& rot_W, const Mat& rot_perp);
VerticalHom reframe(const VerticalHom& b, const Mat& rot_W, const Mat& rot_perp);
BundleVector reframe(const BundleVector& x, const Mat& rot_W, const Mat& rot_perp);

// ============================================================================
// Decomposition of curve velocities

// Sample of a curve in G_m(TN): base point and any basis of W(s).
struct FrameSample {
    ChartPoint base;
    Mat frame;
};
using FramedCurve = std::function<FrameSample(double s)>;

// Velocity at s = 0 split into horizontal and vertical parts, expressed in the
// frames of `attach` (which must lie over the curve's base point at s = 0 and
// span the same W). Metric evaluated at attach.time.
BundleVector decompose(const MetricFamily& metric, const FramedCurve& curve, const GrassmannPoint& attach,
                       const DiffConfig& diff = {});

// Same split from known derivatives: base velocity and the chart-component
// derivative of a basis `frame` of W at s = 0.
BundleVector decompose_velocity(const MetricFamily& metric, const GrassmannPoint& attach, const Vec& base_velocity,
                                const Mat& frame, const Mat& frame_velocity);

// Horizontal lift of u, realized by differentiating frames transported along
// the geodesic with initial velocity u.
BundleVector horizontal_lift(const MetricFamily& metric, const Vec& u, const GrassmannPoint& p,
                             const DiffConfig& diff = {});

// ============================================================================
// Curvature operators

// R-perp(x1, x2): B(i, a) = g(R(x1, x2) v_i, w_a).
VerticalHom r_perp(const MetricFamily& metric, const Vec& x1, const Vec& x2, const GrassmannPoint& p);
VerticalHom r_perp(const CurvatureData& cd, const Vec& x1, const Vec& x2, const GrassmannPoint& p);

// W -> sum_i (R(., v_i) v_i) projected to W-perp: B(j, a) = sum_i g(R(v_j, v_i) v_i, w_a).
VerticalHom script_R(const MetricFamily& metric, const GrassmannPoint& p, double t);
VerticalHom script_R(const CurvatureData& cd, const GrassmannPoint& p);

// ============================================================================
// Vertical covariant derivative

struct VerticalSample {
    GrassmannPoint point;
    VerticalHom value;
};
using VerticalCurve = std::function<VerticalSample(double s)>;

// nabla-perp along the curve at s = 0 of a vertical field given relative to
// the frames of each sample point.
VerticalHom nabla_perp(const MetricFamily& metric, const VerticalCurve& field, const DiffConfig& diff = {});

// ============================================================================
// Bundle charts (x, a) -> span{ v_i(x) + a_i^a w_a(x) }

class BundleChart {
public:
    BundleChart(const MetricFamily& metric, GrassmannPoint center, int geodesic_steps = 8);

    const MetricFamily& metric() const { return *metric_; }
    const GrassmannPoint& center() const { return center_; }
    int n() const { return center_.n(); }
    int m() const { return center_.m(); }
    int l() const { return center_.l(); }
    int dim() const { return n() + m() * l(); }

    // z = (x, a) with a stored row-major: a(i, a) at index n + i * l + a.
    GrassmannPoint map(const Vec& z) const;
    GrassmannPoint map(const Vec& x, const Mat& a) const;

    // Chart coordinates of a point near the center (Newton on the base).
    Vec inverse(const GrassmannPoint& p) const;

    // Velocities of the coordinate curves at z, attached to map(z).
    std::vector<BundleVector> coordinate_basis(const Vec& z, const DiffConfig& diff = {}) const;

private:
    const MetricFamily* metric_;
    GrassmannPoint center_;
    int steps_;
};

GrassmannPoint chart_map(const BundleChart& chart, const Vec& x, const Mat& a);

// Linear combination sum_A c_A basis_A and its inverse.
BundleVector combine(const std::vector<BundleVector>& basis, const Vec& components);
Vec components_in(const std::vector<BundleVector>& basis, const BundleVector& x);

// ============================================================================
// Levi-Civita connection of the (alpha-scaled) Sasaki metric

// Field Y sampled along a curve c with c(0) = P and c'(0) = X.
using FieldAlongCurve = std::function<BundleVector(double s)>;

BundleVector grassmann_connection(const MetricFamily& metric, const BundleVector& x, const FieldAlongCurve& y,
                                  const SasakiConfig& cfg, const DiffConfig& diff = {1e-3, 4});

// Vector field on a chart neighborhood given by its chart components.
using ChartField = std::function<Vec(const Vec& z)>;

// nabla_X Y at map(z0) for chart fields X and Y. `outer` differentiates along
// the X-curve; `inner` builds coordinate velocities.
BundleVector grassmann_connection(const BundleChart& chart, const ChartField& x, const ChartField& y, const Vec& z0,
                                  const SasakiConfig& cfg, const DiffConfig& outer = {1e-3, 4},
                                  const DiffConfig& inner = {1e-4, 4});

// Connection coefficients G(C, A, B) = component C of nabla_{d_A} d_B at z0,
// obtained from grassmann_connection on coordinate fields.
Array3 connection_coefficients(const BundleChart& chart, const Vec& z0, const SasakiConfig& cfg,
                               const DiffConfig& outer = {1e-3, 4}, const DiffConfig& inner = {1e-4, 4});

// Coordinate velocities at z0 and at the stencil offsets along every
// coordinate axis: along[A][k] sits at z0 + offsets[k] * outer.step * e_A.
struct ChartStencilBases {
    Vec z0;
    DiffConfig outer;
    std::vector<BundleVector> basis0;
    std::vector<std::map<int, std::vector<BundleVector>>> along;
};

ChartStencilBases chart_stencil_bases(const BundleChart& chart, const Vec& z0, const DiffConfig& outer = {1e-3, 4},
                                      const DiffConfig& inner = {1e-4, 4});

// Same coefficients from precomputed bases (shared between Sasaki scalings).
Array3 connection_coefficients(const BundleChart& chart, const ChartStencilBases& bases, const SasakiConfig& cfg);

}  // namespace gaussflow
