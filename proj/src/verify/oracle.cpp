// oracle.cpp - Gauss map tension from Sasaki metric components in a bundle chart.

#include "gaussflow/verify.hpp"

#include "gaussflow/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace gaussflow {

namespace {

Mat sasaki_gram(const MetricFamily& metric, const std::vector<BundleVector>& basis, const SasakiConfig& cfg) {
    const int D = int(basis.size());
    Mat G(D, D);
    for (int A = 0; A < D; ++A)
        for (int B = A; B < D; ++B) G(A, B) = G(B, A) = sasaki_inner(metric, basis[A], basis[B], cfg);
    return G;
}

// Christoffel symbols Gamma(k, i, j) of a metric from its value and first
// derivatives dG[c] = d_c G.
Array3 christoffel_from(const Mat& G, const std::vector<Mat>& dG) {
    const int D = int(G.rows());
    const Mat inv = G.inverse();
    Array3 out(D);
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j)
            for (int k = 0; k < D; ++k) {
                double acc = 0.0;
                for (int d = 0; d < D; ++d) acc += inv(k, d) * (dG[i](d, j) + dG[j](d, i) - dG[d](i, j));
                out(k, i, j) = 0.5 * acc;
            }
    return out;
}

}  // namespace

BundleVector oracle_tension_via_chart(const MetricFamily& metric, const AnalyticImmersion& imm, double t, int node,
                                      const SasakiConfig& cfg, const OracleConfig& oc) {
    const Parametrization& param = imm.parametrization();
    const int l = imm.ell();
    const Mat ref = normal_reference_for(imm, metric, t);
    const Vec u0 = imm.grid().param(node);
    auto jet_at = [&](int k0, int k1) {
        Vec u = u0;
        u[0] += k0 * oc.param_step;
        if (l > 1) u[1] += k1 * oc.param_step;
        return param.jet(u);
    };

    const GrassmannPoint center = gauss_point(induced_frames(metric, t, jet_at(0, 0), ref));
    const BundleChart chart(metric, center, oc.geodesic_steps);
    const int D = chart.dim();

    // Chart coordinates z(u) of gamma and the induced metric h(u) at parameter offsets.
    std::map<std::pair<int, int>, Vec> zs;
    std::map<std::pair<int, int>, Mat> hs;
    auto sample = [&](int k0, int k1) {
        const auto key = std::make_pair(k0, k1);
        if (!zs.count(key)) {
            const ImmersionJet jet = jet_at(k0, k1);
            zs[key] = chart.inverse(gauss_point(induced_frames(metric, t, jet, ref)));
            hs[key] = jet.d1.transpose() * eval_metric(metric, jet.point, t) * jet.d1;
        }
        return key;
    };
    const Stencil s1 = central_stencil(1, 4), s2 = central_stencil(2, 4);
    const double d = oc.param_step;
    auto unit = [](int axis, int k) { return axis == 0 ? std::make_pair(k, 0) : std::make_pair(0, k); };

    Mat dz = Mat::Zero(D, l);
    std::vector<Vec> d2z(std::size_t(l * l), Vec::Zero(D));
    std::vector<Mat> dh(std::size_t(l), Mat::Zero(l, l));
    for (int i = 0; i < l; ++i) {
        for (std::size_t k = 0; k < s1.offsets.size(); ++k) {
            const auto [a, b] = unit(i, s1.offsets[k]);
            const auto key = sample(a, b);
            dz.col(i) += (s1.weights[k] / d) * zs[key];
            dh[std::size_t(i)] += (s1.weights[k] / d) * hs[key];
        }
        for (std::size_t k = 0; k < s2.offsets.size(); ++k) {
            const auto [a, b] = unit(i, s2.offsets[k]);
            d2z[std::size_t(i * l + i)] += (s2.weights[k] / (d * d)) * zs[sample(a, b)];
        }
    }
    if (l > 1) {
        Vec mixed = Vec::Zero(D);
        for (std::size_t k = 0; k < s1.offsets.size(); ++k)
            for (std::size_t q = 0; q < s1.offsets.size(); ++q) {
                const double w = s1.weights[k] * s1.weights[q];
                if (w == 0.0) continue;
                mixed += (w / (d * d)) * zs[sample(s1.offsets[k], s1.offsets[q])];
            }
        d2z[1] = d2z[2] = mixed;
    }
    const Vec z0 = zs[sample(0, 0)];
    const Mat h = hs[sample(0, 0)];
    const Mat hinv = h.inverse();
    const Array3 gamma_h = christoffel_from(h, dh);

    // Sasaki metric components and their derivatives around z0.
    const std::vector<BundleVector> basis0 = chart.coordinate_basis(z0, oc.basis);
    const Mat G0 = sasaki_gram(metric, basis0, cfg);
    const Stencil sc = central_stencil(1, oc.chart.order);
    std::vector<Mat> dG(std::size_t(D), Mat::Zero(D, D));
    for (int c = 0; c < D; ++c)
        for (std::size_t k = 0; k < sc.offsets.size(); ++k) {
            if (sc.weights[k] == 0.0) continue;
            Vec z = z0;
            z[c] += sc.offsets[k] * oc.chart.step;
            dG[std::size_t(c)] += (sc.weights[k] / oc.chart.step) * sasaki_gram(metric, chart.coordinate_basis(z, oc.basis), cfg);
        }
    const Array3 gamma_G = christoffel_from(G0, dG);

    Vec tau = Vec::Zero(D);
    for (int i = 0; i < l; ++i)
        for (int j = 0; j < l; ++j) {
            Vec term = d2z[std::size_t(i * l + j)];
            for (int k = 0; k < l; ++k) term -= gamma_h(k, i, j) * dz.col(k);
            for (int A = 0; A < D; ++A) {
                double acc = 0.0;
                for (int B = 0; B < D; ++B)
                    for (int C = 0; C < D; ++C) acc += gamma_G(A, B, C) * dz(B, i) * dz(C, j);
                term[A] += acc;
            }
            tau += hinv(i, j) * term;
        }
    BundleVector out = combine(basis0, tau);
    out.point = center;
    return out;
}

CheckResult check_oracle_tension(const Problem& problem, const std::vector<int>& nodes, double tolerance) {
    const AnalyticImmersion imm = problem.analytic();
    const double t = problem.t0;
    std::vector<double> res(nodes.size(), 0.0), norms(nodes.size(), 0.0);
    parallel_for(int(nodes.size()), [&](int k) {
        const int node = nodes[std::size_t(k)];
        const BundleVector closed = tension_field_gauss(imm, problem.metric, t, node, problem.sasaki);
        BundleVector oracle = oracle_tension_via_chart(problem.metric, imm, t, node, problem.sasaki);
        if (!same_attachment(closed.point, oracle.point, 1e-10))
            throw UsageError("oracle and closed-form tension attached to different frames");
        oracle.point = closed.point;
        const double norm = sasaki_norm(problem.metric, closed, problem.sasaki);
        res[std::size_t(k)] = sasaki_norm(problem.metric, closed - oracle, problem.sasaki) / std::max(norm, 1.0);
        norms[std::size_t(k)] = norm;
    });
    CheckResult r;
    r.name = "oracle_tension";
    r.tolerance = tolerance;
    for (double v : res) {
        r.residual_max = std::max(r.residual_max, v);
        r.residual_mean += v / double(res.size());
    }
    r.extras["tension_norm_max"] = nodes.empty() ? 0.0 : *std::max_element(norms.begin(), norms.end());
    r.extras["nodes"] = double(nodes.size());
    r.note = "relative to max(|tau|, 1) in the Sasaki norm";
    finalize(r);
    return r;
}

}  // namespace gaussflow
