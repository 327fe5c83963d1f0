// decompose.cpp - horizontal/vertical split of curve velocities and nabla-perp.

#include "gaussflow/grassmann.hpp"

namespace gaussflow {

BundleVector decompose_velocity(const MetricFamily& metric, const GrassmannPoint& attach, const Vec& base_velocity,
                                const Mat& frame, const Mat& frame_velocity) {
    const ConnectionData c = connection(metric, attach.base, attach.time);
    const Mat& g = c.metric;
    const int m = attach.m();
    if (frame.cols() != m) throw UsageError("decompose: frame has wrong number of columns");
    const Mat gram = frame.transpose() * g * frame;
    Eigen::LDLT<Mat> ldlt(gram);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.vectorD().minCoeff() < 1e-20)
        throw RankError("decompose: frame of W is degenerate");
    // The curve frame must span the attachment's W.
    if (attach.l() > 0) {
        const Mat proj = attach.frame_Wperp.transpose() * g * frame;
        if (proj.cwiseAbs().maxCoeff() > 1e-7 * std::max(1.0, frame.cwiseAbs().maxCoeff()))
            throw UsageError("decompose: curve frame does not span the attachment's W");
    }

    // Covariant derivative of each frame vector along the base curve.
    Mat nabla(frame.rows(), m);
    for (int i = 0; i < m; ++i)
        nabla.col(i) = frame_velocity.col(i) + contract_christoffel(c.christoffel, base_velocity, frame.col(i));
    // M(a, i): W-perp coefficients of (nabla Y_i); C expresses v_j in the Y_i.
    const Mat M = attach.frame_Wperp.transpose() * g * nabla;
    const Mat C = ldlt.solve(frame.transpose() * g * attach.frame_W);
    BundleVector out;
    out.point = attach;
    out.horizontal = base_velocity;
    out.vertical = VerticalHom((M * C).transpose());
    return out;
}

BundleVector decompose(const MetricFamily& metric, const FramedCurve& curve, const GrassmannPoint& attach,
                       const DiffConfig& diff) {
    const Stencil s = central_stencil(1, diff.order);
    const FrameSample s0 = curve(0.0);
    if (metric.displacement(attach.base, s0.base).cwiseAbs().maxCoeff() > 1e-12)
        throw UsageError("decompose: curve does not pass through the attachment point");
    Vec dx = Vec::Zero(attach.n());
    Mat dframe = Mat::Zero(s0.frame.rows(), s0.frame.cols());
    for (std::size_t k = 0; k < s.offsets.size(); ++k) {
        if (s.weights[k] == 0.0) continue;
        const FrameSample sk = curve(s.offsets[k] * diff.step);
        const double w = s.weights[k] / diff.step;
        dx += w * metric.displacement(s0.base, sk.base);
        dframe += w * sk.frame;
    }
    return decompose_velocity(metric, attach, dx, s0.frame, dframe);
}

BundleVector horizontal_lift(const MetricFamily& metric, const Vec& u, const GrassmannPoint& p, const DiffConfig& diff) {
    if (u.cwiseAbs().maxCoeff() == 0.0) return BundleVector{p, Vec::Zero(p.n()), VerticalHom::zero(p.m(), p.l())};
    const FramedCurve curve = [&](double s) {
        const TransportResult r = geodesic_transport(metric, p.time, p.base, s * u, p.frame_W, 16);
        return FrameSample{r.end, r.transported};
    };
    return decompose(metric, curve, p, diff);
}

VerticalHom nabla_perp(const MetricFamily& metric, const VerticalCurve& field, const DiffConfig& diff) {
    const Stencil s = central_stencil(1, diff.order);
    const VerticalSample f0 = field(0.0);
    const GrassmannPoint& p = f0.point;
    const int m = p.m(), l = p.l(), n = p.n();
    // U_i(s) = Y(v_i(s)) = sum_a B(i, a)(s) w_a(s); v_i(s) = frame_W(s) column i.
    auto images = [&](const VerticalSample& v) { return Mat(v.point.frame_Wperp * v.value.coeffs.transpose()); };
    Vec dx = Vec::Zero(n);
    Mat dU = Mat::Zero(n, m), dV = Mat::Zero(n, m);
    for (std::size_t k = 0; k < s.offsets.size(); ++k) {
        if (s.weights[k] == 0.0) continue;
        const VerticalSample fk = field(s.offsets[k] * diff.step);
        if (fk.point.m() != m || fk.value.coeffs.rows() != m || fk.value.coeffs.cols() != l)
            throw UsageError("nabla_perp: inconsistent samples along the curve");
        const double w = s.weights[k] / diff.step;
        dx += w * metric.displacement(p.base, fk.point.base);
        dU += w * images(fk);
        dV += w * fk.point.frame_W;
    }
    const ConnectionData c = connection(metric, p.base, p.time);
    const Mat& g = c.metric;
    const Mat U0 = images(f0);
    Mat out(m, l);
    for (int i = 0; i < m; ++i) {
        const Vec nablaU = dU.col(i) + contract_christoffel(c.christoffel, dx, U0.col(i));
        const Vec nablaV = dV.col(i) + contract_christoffel(c.christoffel, dx, p.frame_W.col(i));
        const Vec lowU = g * nablaU;
        const Vec lowV = g * nablaV;
        for (int a = 0; a < l; ++a) {
            double corr = 0.0;
            for (int j = 0; j < m; ++j) corr += lowV.dot(p.frame_W.col(j)) * f0.value.coeffs(j, a);
            out(i, a) = lowU.dot(p.frame_Wperp.col(a)) - corr;
        }
    }
    return VerticalHom(out);
}

}  // namespace gaussflow
