// node_geometry.cpp - frames, second fundamental form and normal gradients.

#include "gaussflow/immersion.hpp"
#include "gaussflow/parallel.hpp"

#include <cmath>

namespace gaussflow {

namespace {

Mat normal_frame(const Mat& g, const Mat& d1, const Mat& pushed, const Mat& reference) {
    const int n = int(g.rows()), m = n - int(pushed.cols());
    if (m == 1) {
        // Orientation gauge: det[dF | nu] > 0 keeps nu continuous along F.
        Mat nu = orthonormal_complement(pushed, g);
        Mat full(n, n);
        full << d1, nu;
        if (full.determinant() < 0.0) nu = -nu;
        return nu;
    }
    if (reference.cols() != m || reference.rows() != n) return orthonormal_complement(pushed, g);
    const Mat projected = reference - pushed * (pushed.transpose() * g * reference);
    try {
        return gram_schmidt(projected, g, 1e-6);
    } catch (const RankError&) {
        throw DegeneracyError("normal reference is nearly tangent; choose another normal reference");
    }
}

Mat reference_for(const Immersion& imm, const MetricFamily& metric, double t) {
    return normal_reference_for(imm, metric, t);
}

SecondFundamental frames_from(const Mat& g, double t, const ImmersionJet& jet, const Mat& normal_reference) {
    const int n = jet.point.dim(), l = int(jet.d1.cols());
    if (jet.d1.rows() != n || l < 1 || l >= n) throw UsageError("immersion jet has inconsistent shape");
    SecondFundamental s;
    s.point = jet.point;
    s.time = t;
    s.induced = jet.d1.transpose() * g * jet.d1;
    try {
        s.tangent = gram_schmidt(Mat::Identity(l, l), s.induced, 1e-12);
    } catch (const RankError&) {
        throw DegeneracyError("immersion is degenerate: induced metric lost rank");
    }
    s.pushed = jet.d1 * s.tangent;
    s.normal = normal_frame(g, jet.d1, s.pushed, normal_reference);
    return s;
}

}  // namespace

// Defaults to the normal frame at node 0.
Mat normal_reference_for(const Immersion& imm, const MetricFamily& metric, double t) {
    if (imm.codim() < 2 || imm.normal_reference().size() > 0) return imm.normal_reference();
    return induced_frames(metric, t, imm.jet(metric, 0)).normal;
}

double SecondFundamental::A_norm2() const {
    double s = 0.0;
    for (double v : A.data()) s += v * v;
    return s;
}

SecondFundamental induced_frames(const MetricFamily& metric, double t, const ImmersionJet& jet,
                                 const Mat& normal_reference) {
    return frames_from(eval_metric(metric, jet.point, t), t, jet, normal_reference);
}

SecondFundamental second_fundamental_form(const MetricFamily& metric, double t, const ImmersionJet& jet,
                                          const Mat& normal_reference) {
    return second_fundamental_form(connection(metric, jet.point, t), t, jet, normal_reference);
}

SecondFundamental second_fundamental_form(const ConnectionData& c, double t, const ImmersionJet& jet,
                                          const Mat& normal_reference) {
    SecondFundamental s = frames_from(c.metric, t, jet, normal_reference);
    const int n = jet.point.dim(), l = s.ell(), m = s.codim();
    // Normal coefficients of nabla_{d_i} dF(d_j) = d_ij F + Gamma(d_i F, d_j F).
    const Mat lowN = c.metric * s.normal;
    std::vector<Vec> coord(std::size_t(l * l));
    for (int i = 0; i < l; ++i)
        for (int j = 0; j < l; ++j)
            coord[std::size_t(i * l + j)] =
                lowN.transpose() * (jet.second(i, j) + contract_christoffel(c.christoffel, jet.d1.col(i), jet.d1.col(j)));
    s.A = Array3(l, l, m);
    s.A_vec.assign(std::size_t(l * l), Vec::Zero(n));
    s.H = Vec::Zero(n);
    for (int i = 0; i < l; ++i)
        for (int j = 0; j < l; ++j) {
            Vec a = Vec::Zero(m);
            for (int p = 0; p < l; ++p)
                for (int q = 0; q < l; ++q) a += s.tangent(p, i) * s.tangent(q, j) * coord[std::size_t(p * l + q)];
            for (int al = 0; al < m; ++al) s.A(i, j, al) = a[al];
            s.A_vec[std::size_t(i * l + j)] = s.normal * a;
        }
    for (int i = 0; i < l; ++i) s.H += s.A_vec[std::size_t(i * l + i)];
    s.H_coeffs = lowN.transpose() * s.H;
    return s;
}

SecondFundamental induced_frames(const Immersion& imm, const MetricFamily& metric, double t, int node) {
    return induced_frames(metric, t, imm.jet(metric, node), reference_for(imm, metric, t));
}

SecondFundamental second_fundamental_form(const Immersion& imm, const MetricFamily& metric, double t, int node) {
    return second_fundamental_form(metric, t, imm.jet(metric, node), reference_for(imm, metric, t));
}

std::vector<SecondFundamental> second_fundamental_field(const Immersion& imm, const MetricFamily& metric, double t) {
    const Mat ref = reference_for(imm, metric, t);
    std::vector<SecondFundamental> out(std::size_t(imm.grid().node_count()));
    parallel_for(imm.grid().node_count(), [&](int v) {
        out[std::size_t(v)] = second_fundamental_form(metric, t, imm.jet(metric, v), ref);
    });
    return out;
}

namespace {

// B(j, k) = g(nu_j, nabla_{e_k} V) from first differences dV[a] of the chart
// components of V along each parameter axis.
VerticalHom normal_gradient_from(const SecondFundamental& s, const ConnectionData& c, const Mat& d1, const Vec& V,
                                 const std::vector<Vec>& dV) {
    const int l = s.ell(), m = s.codim();
    std::vector<Vec> nabla(static_cast<std::size_t>(l));
    for (int a = 0; a < l; ++a) nabla[std::size_t(a)] = dV[std::size_t(a)] + contract_christoffel(c.christoffel, d1.col(a), V);
    const Mat lowN = c.metric * s.normal;
    Mat B(m, l);
    for (int k = 0; k < l; ++k) {
        Vec along = Vec::Zero(V.size());
        for (int a = 0; a < l; ++a) along += s.tangent(a, k) * nabla[std::size_t(a)];
        B.col(k) = lowN.transpose() * along;
    }
    return VerticalHom(B);
}

}  // namespace

VerticalHom normal_gradient_H(const Immersion& imm, const MetricFamily& metric, double t, int node,
                              const std::vector<SecondFundamental>* field) {
    const Mat ref = reference_for(imm, metric, t);
    const ImmersionJet j0 = imm.jet(metric, node);
    const SecondFundamental s0 =
        field ? (*field)[std::size_t(node)] : second_fundamental_form(metric, t, j0, ref);
    std::vector<Vec> dH(std::size_t(imm.ell()), Vec::Zero(j0.point.dim()));
    for (int a = 0; a < imm.ell(); ++a) {
        for (const WeightedJet& w : imm.derivative_jets(metric, node, a)) {
            const Vec H = (field && w.node >= 0) ? (*field)[std::size_t(w.node)].H
                                                 : second_fundamental_form(metric, t, w.jet, ref).H;
            if (w.jet.point.chart_id != j0.point.chart_id) throw ChartError("normal gradient: neighbours in different charts");
            dH[std::size_t(a)] += w.weight * H;
        }
    }
    return normal_gradient_from(s0, connection(metric, j0.point, t), j0.d1, s0.H, dH);
}

VerticalHom normal_gradient(const Immersion& imm, const MetricFamily& metric, double t, int node,
                            const std::vector<Vec>& values) {
    if (int(values.size()) != imm.grid().node_count()) throw UsageError("normal gradient: one value per node required");
    const ImmersionJet j0 = imm.jet(metric, node);
    const SecondFundamental s0 = induced_frames(metric, t, j0, reference_for(imm, metric, t));
    std::vector<Vec> dV(std::size_t(imm.ell()), Vec::Zero(j0.point.dim()));
    for (int a = 0; a < imm.ell(); ++a) {
        for (const WeightedJet& w : imm.derivative_jets(metric, node, a)) {
            if (w.node < 0) throw UsageError("normal gradient of node values needs lattice neighbours");
            dV[std::size_t(a)] += w.weight * values[std::size_t(w.node)];
        }
    }
    return normal_gradient_from(s0, connection(metric, j0.point, t), j0.d1, values[std::size_t(node)], dV);
}

}  // namespace gaussflow
