// curvature.cpp - Christoffel symbols, Riemann and Ricci tensors from metric jets.

#include "gaussflow/ambient.hpp"

namespace gaussflow {

MetricJet metric_jet(const MetricFamily& m, const ChartPoint& x, double t, int order) {
    m.check_time(t);
    MetricJet jet = m.reference().jet(x, order);
    const auto& blocks = m.blocks();
    if (blocks.size() == 1 && blocks[0].lambda == 0.0 && m.normalization() == 0.0 && blocks[0].c0 == 1.0) return jet;
    const int n = m.dim();
    std::vector<double> c(n);
    for (int i = 0; i < n; ++i) c[i] = m.scale(m.block_of(i), t);
    // Reference metrics are block diagonal, so entry (i, j) scales with the
    // block of i.
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            jet.g(i, j) *= c[i];
            if (order >= 1)
                for (int k = 0; k < n; ++k) jet.dg(k, i, j) *= c[i];
            if (order >= 2)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l) jet.d2g[k](l, i, j) *= c[i];
        }
    return jet;
}

Mat eval_metric(const MetricFamily& m, const ChartPoint& x, double t) {
    Mat g = metric_jet(m, x, t, 0).g;
#ifndef NDEBUG
    require_positive_definite(g);
#endif
    return g;
}

namespace {

// Christoffel symbols of the first kind, Gamma_lij.
Array3 first_kind(const MetricJet& jet) {
    const int n = int(jet.g.rows());
    Array3 c(n);
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                const double v = 0.5 * (jet.dg(i, j, l) + jet.dg(j, i, l) - jet.dg(l, i, j));
                c(l, i, j) = v;
                c(l, j, i) = v;
            }
    return c;
}

Array3 raise(const Mat& ginv, const Array3& low) {
    const int n = int(ginv.rows());
    Array3 out(n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                double s = 0.0;
                for (int l = 0; l < n; ++l) s += ginv(k, l) * low(l, i, j);
                out(k, i, j) = s;
                out(k, j, i) = s;
            }
    return out;
}

}  // namespace

ConnectionData connection(const MetricFamily& m, const ChartPoint& x, double t) {
    const MetricJet jet = metric_jet(m, x, t, 1);
    ConnectionData c;
    c.metric = jet.g;
    c.inverse = spd_inverse(jet.g);
    c.christoffel = raise(c.inverse, first_kind(jet));
    return c;
}

Array3 christoffel(const MetricFamily& m, const ChartPoint& x, double t) {
    return connection(m, x, t).christoffel;
}

CurvatureData curvature_from_jet(const MetricJet& jet) {
    if (jet.order < 2) throw UsageError("curvature needs a second-order metric jet");
    const int n = int(jet.g.rows());
    CurvatureData cd;
    cd.metric = jet.g;
    cd.inverse = spd_inverse(jet.g);
    const Mat& gi = cd.inverse;
    const Array3 low = first_kind(jet);
    cd.christoffel = raise(gi, low);
    const Array3& G = cd.christoffel;

    // dG[c](a, d, b) = d_c Gamma^a_db
    std::vector<Array3> dG(n, Array3(n));
    for (int c = 0; c < n; ++c) {
        // d_c g^{kl} = -g^{kp} d_c g_pq g^{ql}
        Mat dgc(n, n);
        for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q) dgc(p, q) = jet.dg(c, p, q);
        const Mat dginv = -gi * dgc * gi;
        for (int a = 0; a < n; ++a)
            for (int d = 0; d < n; ++d)
                for (int b = d; b < n; ++b) {
                    double s = 0.0;
                    for (int l = 0; l < n; ++l) {
                        const double dlow =
                            0.5 * (jet.d2g[c](d, b, l) + jet.d2g[c](b, d, l) - jet.d2g[c](l, d, b));
                        s += dginv(a, l) * low(l, d, b) + gi(a, l) * dlow;
                    }
                    dG[c](a, d, b) = s;
                    dG[c](a, b, d) = s;
                }
    }

    cd.riemann = Array4(n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = c + 1; d < n; ++d) {
                    double s = dG[c](a, d, b) - dG[d](a, c, b);
                    for (int e = 0; e < n; ++e) s += G(a, c, e) * G(e, d, b) - G(a, d, e) * G(e, c, b);
                    cd.riemann(a, b, c, d) = s;
                    cd.riemann(a, b, d, c) = -s;
                }

    cd.ricci = Mat::Zero(n, n);
    for (int b = 0; b < n; ++b)
        for (int d = 0; d < n; ++d) {
            double s = 0.0;
            for (int a = 0; a < n; ++a) s += cd.riemann(a, b, a, d);
            cd.ricci(b, d) = s;
        }
    return cd;
}

CurvatureData curvature(const MetricFamily& m, const ChartPoint& x, double t) {
    CurvatureData cd = curvature_from_jet(metric_jet(m, x, t, 2));
    cd.evaluated_at = x;
    cd.time = t;
    return cd;
}

Array4 riemann_tensor(const MetricFamily& m, const ChartPoint& x, double t) { return curvature(m, x, t).riemann; }

Mat ricci_tensor(const MetricFamily& m, const ChartPoint& x, double t) { return curvature(m, x, t).ricci; }

Array4 CurvatureData::lowered() const {
    const int n = int(metric.rows());
    Array4 L(n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    double s = 0.0;
                    for (int e = 0; e < n; ++e) s += metric(a, e) * riemann(e, b, c, d);
                    L(a, b, c, d) = s;
                }
    return L;
}

Mat metric_time_derivative(const MetricFamily& m, const ChartPoint& x, double t) {
    m.check_time(t);
    const int n = m.dim();
    if (m.kind() != MetricKind::grid_sampled) {
        const Mat g0 = m.reference().jet(x, 0).g;
        Mat q(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) q(i, j) = m.scale_rate(m.block_of(i), t) * g0(i, j);
        return q;
    }
    const double h = MetricFamily::kTimeStep;
    if (t - h < 0.0) throw DomainError("time derivative needs t >= step at the start of the time domain");
    return (eval_metric(m, x, t + h) - eval_metric(m, x, t - h)) / (2.0 * h);
}

Vec apply_riemann(const Array4& R, const Vec& X, const Vec& Y, const Vec& Z) {
    const int n = R.dim();
    Vec out = Vec::Zero(n);
    for (int c = 0; c < n; ++c)
        for (int d = c + 1; d < n; ++d) {
            const double biv = X[c] * Y[d] - X[d] * Y[c];
            if (biv == 0.0) continue;
            for (int a = 0; a < n; ++a) {
                double s = 0.0;
                for (int b = 0; b < n; ++b) s += R(a, b, c, d) * Z[b];
                out[a] += s * biv;
            }
        }
    return out;
}

Vec contract_christoffel(const Array3& G, const Vec& X, const Vec& Y) {
    const int n = G.dim(0);
    Vec out = Vec::Zero(n);
    for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) s += G(k, i, j) * X[i] * Y[j];
        out[k] = s;
    }
    return out;
}

}  // namespace gaussflow
