// geodesic.cpp - geodesics with parallel transport by fixed-step RK4.

#include "gaussflow/ambient.hpp"

namespace gaussflow {

namespace {

struct TransportState {
    Vec x;
    Vec v;
    Mat vectors;
};

TransportState rhs(const MetricFamily& m, double t, int chart, const TransportState& s) {
    const Array3 G = christoffel(m, ChartPoint(s.x, chart), t);
    TransportState d;
    d.x = s.v;
    d.v = -contract_christoffel(G, s.v, s.v);
    d.vectors.resize(s.vectors.rows(), s.vectors.cols());
    for (int c = 0; c < s.vectors.cols(); ++c) d.vectors.col(c) = -contract_christoffel(G, s.v, s.vectors.col(c));
    return d;
}

TransportState axpy(const TransportState& s, double h, const TransportState& d) {
    return TransportState{s.x + h * d.x, s.v + h * d.v, s.vectors + h * d.vectors};
}

}  // namespace

TransportResult geodesic_transport(const MetricFamily& m, double t, const ChartPoint& x, const Vec& v,
                                   const Mat& vectors, int steps) {
    if (v.size() != x.dim() || vectors.rows() != x.dim()) throw UsageError("geodesic: dimension mismatch");
    TransportState s{x.coords, v, vectors};
    if (v.cwiseAbs().maxCoeff() == 0.0 || m.kind() == MetricKind::euclidean || m.kind() == MetricKind::flat_torus) {
        // Flat charts: straight lines and constant components.
        return TransportResult{ChartPoint(x.coords + v, x.chart_id), v, vectors};
    }
    const double h = 1.0 / steps;
    for (int k = 0; k < steps; ++k) {
        const TransportState k1 = rhs(m, t, x.chart_id, s);
        const TransportState k2 = rhs(m, t, x.chart_id, axpy(s, 0.5 * h, k1));
        const TransportState k3 = rhs(m, t, x.chart_id, axpy(s, 0.5 * h, k2));
        const TransportState k4 = rhs(m, t, x.chart_id, axpy(s, h, k3));
        s.x += h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
        s.v += h / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
        s.vectors += h / 6.0 * (k1.vectors + 2.0 * k2.vectors + 2.0 * k3.vectors + k4.vectors);
    }
    return TransportResult{ChartPoint(s.x, x.chart_id), s.v, s.vectors};
}

}  // namespace gaussflow
