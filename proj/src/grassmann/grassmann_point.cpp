// grassmann_point.cpp - frames, fiber metric, Sasaki inner product, curvature operators.

#include "gaussflow/grassmann.hpp"

#include <cmath>

namespace gaussflow {

GrassmannPoint GrassmannPoint::from_span(const MetricFamily& metric, const ChartPoint& base, double t,
                                         const Mat& spanning) {
    const Mat g = eval_metric(metric, base, t);
    GrassmannPoint p;
    p.base = base;
    p.time = t;
    p.frame_W = gram_schmidt(spanning, g);
    p.frame_Wperp = orthonormal_complement(p.frame_W, g);
    return p;
}

double GrassmannPoint::frame_residual(const MetricFamily& metric) const {
    const Mat g = eval_metric(metric, base, time);
    Mat all(n(), n());
    all << frame_W, frame_Wperp;
    return gram_residual(all, g);
}

double fiber_inner(const VerticalHom& a, const VerticalHom& b) {
    if (a.coeffs.rows() != b.coeffs.rows() || a.coeffs.cols() != b.coeffs.cols())
        throw UsageError("vertical homomorphisms of different shapes");
    return (a.coeffs.array() * b.coeffs.array()).sum();
}

bool same_attachment(const GrassmannPoint& p, const GrassmannPoint& q, double tol) {
    if (p.n() != q.n() || p.m() != q.m() || p.base.chart_id != q.base.chart_id) return false;
    if (std::abs(p.time - q.time) > tol) return false;
    if ((p.base.coords - q.base.coords).cwiseAbs().maxCoeff() > tol) return false;
    if (p.m() > 0 && (p.frame_W - q.frame_W).cwiseAbs().maxCoeff() > tol) return false;
    if (p.l() > 0 && (p.frame_Wperp - q.frame_Wperp).cwiseAbs().maxCoeff() > tol) return false;
    return true;
}

namespace {

void require_same(const BundleVector& x, const BundleVector& y) {
    if (!same_attachment(x.point, y.point)) throw UsageError("bundle vectors attached to different points");
}

}  // namespace

BundleVector operator+(const BundleVector& x, const BundleVector& y) {
    require_same(x, y);
    return BundleVector{x.point, x.horizontal + y.horizontal, VerticalHom(x.vertical.coeffs + y.vertical.coeffs)};
}

BundleVector operator-(const BundleVector& x, const BundleVector& y) {
    require_same(x, y);
    return BundleVector{x.point, x.horizontal - y.horizontal, VerticalHom(x.vertical.coeffs - y.vertical.coeffs)};
}

BundleVector operator*(double s, const BundleVector& x) {
    return BundleVector{x.point, s * x.horizontal, VerticalHom(s * x.vertical.coeffs)};
}

double sasaki_inner(const MetricFamily& metric, const BundleVector& x, const BundleVector& y, const SasakiConfig& cfg) {
    if (!(cfg.alpha > 0.0)) throw ConfigError("Sasaki scaling constant must be positive");
    require_same(x, y);
    const Mat g = eval_metric(metric, x.point.base, x.point.time);
    return double(x.horizontal.transpose() * g * y.horizontal) + cfg.alpha * fiber_inner(x.vertical, y.vertical);
}

double sasaki_norm(const MetricFamily& metric, const BundleVector& x, const SasakiConfig& cfg) {
    return std::sqrt(std::max(0.0, sasaki_inner(metric, x, x, cfg)));
}

GrassmannPoint reframe(const GrassmannPoint& p, const Mat& rot_W, const Mat& rot_perp) {
    GrassmannPoint q = p;
    q.frame_W = p.frame_W * rot_W;
    q.frame_Wperp = p.frame_Wperp * rot_perp;
    return q;
}

VerticalHom reframe(const VerticalHom& b, const Mat& rot_W, const Mat& rot_perp) {
    // New v'_j = sum_i v_i R_ij and w'_b = sum_a w_a S_ab, hence B' = R^T B S.
    return VerticalHom(rot_W.transpose() * b.coeffs * rot_perp);
}

BundleVector reframe(const BundleVector& x, const Mat& rot_W, const Mat& rot_perp) {
    return BundleVector{reframe(x.point, rot_W, rot_perp), x.horizontal, reframe(x.vertical, rot_W, rot_perp)};
}

VerticalHom r_perp(const CurvatureData& cd, const Vec& x1, const Vec& x2, const GrassmannPoint& p) {
    const int m = p.m(), l = p.l();
    Mat b(m, l);
    for (int i = 0; i < m; ++i) {
        const Vec r = apply_riemann(cd.riemann, x1, x2, p.frame_W.col(i));
        const Vec rl = cd.metric * r;
        for (int a = 0; a < l; ++a) b(i, a) = rl.dot(p.frame_Wperp.col(a));
    }
    return VerticalHom(b);
}

VerticalHom r_perp(const MetricFamily& metric, const Vec& x1, const Vec& x2, const GrassmannPoint& p) {
    return r_perp(curvature(metric, p.base, p.time), x1, x2, p);
}

VerticalHom script_R(const CurvatureData& cd, const GrassmannPoint& p) {
    const int m = p.m(), l = p.l(), n = p.n();
    Mat b = Mat::Zero(m, l);
    for (int j = 0; j < m; ++j) {
        Vec acc = Vec::Zero(n);
        for (int i = 0; i < m; ++i) acc += apply_riemann(cd.riemann, p.frame_W.col(j), p.frame_W.col(i), p.frame_W.col(i));
        const Vec low = cd.metric * acc;
        for (int a = 0; a < l; ++a) b(j, a) = low.dot(p.frame_Wperp.col(a));
    }
    return VerticalHom(b);
}

VerticalHom script_R(const MetricFamily& metric, const GrassmannPoint& p, double t) {
    return script_R(curvature(metric, p.base, t), p);
}

}  // namespace gaussflow
