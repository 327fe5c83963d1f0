// gauss_map.cpp - Gauss map, its differential, energy density and tension.

#include "gaussflow/immersion.hpp"
#include "gaussflow/parallel.hpp"

namespace gaussflow {

GrassmannPoint gauss_point(const SecondFundamental& sff) {
    GrassmannPoint p;
    p.base = sff.point;
    p.time = sff.time;
    p.frame_W = sff.normal;
    p.frame_Wperp = sff.pushed;
    return p;
}

GaussMapField gauss_map(const Immersion& imm, const MetricFamily& metric, double t) {
    const std::vector<SecondFundamental> field = second_fundamental_field(imm, metric, t);
    GaussMapField out;
    out.reserve(field.size());
    for (const SecondFundamental& s : field) out.push_back(gauss_point(s));
    return out;
}

BundleVector gauss_map_differential(const SecondFundamental& sff, int i) {
    const int l = sff.ell(), m = sff.codim();
    if (i < 0 || i >= l) throw UsageError("gauss map differential: direction index out of range");
    Mat B(m, l);
    for (int j = 0; j < m; ++j)
        for (int k = 0; k < l; ++k) B(j, k) = -sff.A(i, k, j);
    return BundleVector{gauss_point(sff), sff.pushed.col(i), VerticalHom(B)};
}

double gauss_energy_density(const SecondFundamental& sff, const SasakiConfig& cfg) {
    if (!(cfg.alpha > 0.0)) throw ConfigError("Sasaki scaling constant must be positive");
    return double(sff.ell()) + cfg.alpha * sff.A_norm2();
}

VerticalHom ricci_normal_tangent(const SecondFundamental& sff, const CurvatureData& cd) {
    return VerticalHom(sff.normal.transpose() * cd.ricci * sff.pushed);
}

BundleVector tension_from_parts(const SecondFundamental& sff, const CurvatureData& cd, const VerticalHom& grad_H,
                                const SasakiConfig& cfg) {
    if (!(cfg.alpha > 0.0)) throw ConfigError("Sasaki scaling constant must be positive");
    const int n = sff.point.dim(), l = sff.ell(), m = sff.codim();
    const Mat& g = cd.metric;

    // omega(W) = sum_{i,k} g(R(A(e_k, e_i), e_k) W, e_i).
    Vec omega = Vec::Zero(n);
    for (int i = 0; i < l; ++i)
        for (int k = 0; k < l; ++k) {
            const Vec lowE = g * sff.pushed.col(i);
            for (int b = 0; b < n; ++b)
                omega[b] += lowE.dot(apply_riemann(cd.riemann, sff.A_at(k, i), sff.pushed.col(k), Vec::Unit(n, b)));
        }

    Mat B = -grad_H.coeffs;
    for (int j = 0; j < m; ++j)
        for (int k = 0; k < l; ++k)
            for (int i = 0; i < l; ++i)
                B(j, k) += (g * sff.pushed.col(i)).dot(apply_riemann(cd.riemann, sff.pushed.col(i), sff.normal.col(j),
                                                                      sff.pushed.col(k)));
    return BundleVector{gauss_point(sff), sff.H + cfg.alpha * (cd.inverse * omega), VerticalHom(B)};
}

BundleVector tension_field_gauss(const Immersion& imm, const MetricFamily& metric, double t, int node,
                                 const SasakiConfig& cfg, const std::vector<SecondFundamental>* field) {
    const SecondFundamental s = field ? (*field)[std::size_t(node)] : second_fundamental_form(imm, metric, t, node);
    const VerticalHom gradH = normal_gradient_H(imm, metric, t, node, field);
    return tension_from_parts(s, curvature(metric, s.point, t), gradH, cfg);
}

}  // namespace gaussflow
