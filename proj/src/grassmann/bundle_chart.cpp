// bundle_chart.cpp - bundle charts built from radial parallel transport.

#include "gaussflow/grassmann.hpp"

#include <cmath>

namespace gaussflow {

BundleChart::BundleChart(const MetricFamily& metric, GrassmannPoint center, int geodesic_steps)
    : metric_(&metric), center_(std::move(center)), steps_(geodesic_steps) {
    if (center_.frame_residual(metric) > 1e-10) throw UsageError("bundle chart center must have orthonormal frames");
}

GrassmannPoint BundleChart::map(const Vec& x, const Mat& a) const {
    const int n = this->n(), m = this->m(), l = this->l();
    if (x.size() != n || a.rows() != m || a.cols() != l) throw UsageError("bundle chart: coordinate shape mismatch");
    try {
        Mat E(n, n);
        E << center_.frame_W, center_.frame_Wperp;
        const TransportResult r = geodesic_transport(*metric_, center_.time, center_.base, E * x, E, steps_);
        const Mat V = r.transported.leftCols(m);
        const Mat Wp = r.transported.rightCols(l);
        const Mat g = eval_metric(*metric_, r.end, center_.time);
        GrassmannPoint p;
        p.base = r.end;
        p.time = center_.time;
        p.frame_W = gram_schmidt(V + Wp * a.transpose(), g);
        Mat both(n, n);
        both << p.frame_W, Wp;
        p.frame_Wperp = gram_schmidt(both, g).rightCols(l);
        return p;
    } catch (const DomainError& e) {
        throw ChartError(std::string("bundle chart left the ambient chart: ") + e.what());
    } catch (const RankError& e) {
        throw ChartError(std::string("bundle chart degenerate: ") + e.what());
    } catch (const DegeneracyError& e) {
        throw ChartError(std::string("bundle chart degenerate: ") + e.what());
    }
}

GrassmannPoint BundleChart::map(const Vec& z) const {
    const int n = this->n(), m = this->m(), l = this->l();
    if (z.size() != dim()) throw UsageError("bundle chart: coordinate vector has wrong size");
    Mat a(m, l);
    for (int i = 0; i < m; ++i)
        for (int al = 0; al < l; ++al) a(i, al) = z[n + i * l + al];
    return map(z.head(n), a);
}

GrassmannPoint chart_map(const BundleChart& chart, const Vec& x, const Mat& a) { return chart.map(x, a); }

Vec BundleChart::inverse(const GrassmannPoint& p) const {
    const int n = this->n(), m = this->m(), l = this->l();
    Mat E(n, n);
    E << center_.frame_W, center_.frame_Wperp;
    auto transport = [&](const Vec& x) {
        return geodesic_transport(*metric_, center_.time, center_.base, E * x, E, steps_);
    };
    const bool flat = metric_->kind() == MetricKind::euclidean || metric_->kind() == MetricKind::flat_torus;
    Vec x = Vec::Zero(n);
    TransportResult r = transport(x);
    for (int it = 0; it < 40; ++it) {
        const Vec res = metric_->displacement(r.end, p.base);
        if (res.norm() < 1e-14 * std::max(1.0, p.base.coords.norm())) break;
        Mat J(n, n);
        if (flat) {
            J = E;
        } else {
            const double h = 1e-6;
            for (int k = 0; k < n; ++k) {
                Vec xp = x, xm = x;
                xp[k] += h;
                xm[k] -= h;
                J.col(k) = metric_->displacement(transport(xm).end, transport(xp).end) / (2.0 * h);
            }
        }
        x += J.partialPivLu().solve(res);
        r = transport(x);
        if (it == 39) throw ChartError("bundle chart inverse did not converge");
    }
    // Coordinates of the given frame in the transported basis: D = V K_top + Wp K_bot.
    const Mat K = r.transported.partialPivLu().solve(p.frame_W);
    const Mat top = K.topRows(m);
    const Eigen::FullPivLU<Mat> lu(top);
    if (!lu.isInvertible() || std::abs(top.determinant()) < 1e-10) throw ChartError("subspace outside the bundle chart");
    const Mat a = (K.bottomRows(l) * lu.inverse()).transpose();
    Vec z(dim());
    z.head(n) = x;
    for (int i = 0; i < m; ++i)
        for (int al = 0; al < l; ++al) z[n + i * l + al] = a(i, al);
    return z;
}

std::vector<BundleVector> BundleChart::coordinate_basis(const Vec& z, const DiffConfig& diff) const {
    const GrassmannPoint attach = map(z);
    std::vector<BundleVector> basis;
    basis.reserve(dim());
    for (int A = 0; A < dim(); ++A) {
        const FramedCurve curve = [&](double s) {
            if (s == 0.0) return FrameSample{attach.base, attach.frame_W};
            Vec zs = z;
            zs[A] += s;
            const GrassmannPoint q = map(zs);
            return FrameSample{q.base, q.frame_W};
        };
        basis.push_back(decompose(*metric_, curve, attach, diff));
    }
    return basis;
}

namespace {

Vec flatten(const BundleVector& x) {
    const int n = int(x.horizontal.size());
    const int m = int(x.vertical.coeffs.rows()), l = int(x.vertical.coeffs.cols());
    Vec out(n + m * l);
    out.head(n) = x.horizontal;
    for (int i = 0; i < m; ++i)
        for (int a = 0; a < l; ++a) out[n + i * l + a] = x.vertical.coeffs(i, a);
    return out;
}

}  // namespace

BundleVector combine(const std::vector<BundleVector>& basis, const Vec& c) {
    if (basis.empty() || int(basis.size()) != c.size()) throw UsageError("combine: size mismatch");
    BundleVector out = basis[0];
    out.horizontal = c[0] * basis[0].horizontal;
    out.vertical.coeffs = c[0] * basis[0].vertical.coeffs;
    for (std::size_t A = 1; A < basis.size(); ++A) {
        out.horizontal += c[A] * basis[A].horizontal;
        out.vertical.coeffs += c[A] * basis[A].vertical.coeffs;
    }
    return out;
}

Vec components_in(const std::vector<BundleVector>& basis, const BundleVector& x) {
    const int D = int(basis.size());
    Mat B(D, D);
    for (int A = 0; A < D; ++A) B.col(A) = flatten(basis[A]);
    const Vec rhs = flatten(x);
    if (rhs.size() != D) throw UsageError("components_in: vector does not match the basis");
    return B.partialPivLu().solve(rhs);
}

}  // namespace gaussflow
