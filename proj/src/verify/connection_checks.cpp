// connection_checks.cpp - Sasaki connection axioms and script-R structure.

#include "gaussflow/verify.hpp"

#include <algorithm>
#include <cmath>

namespace gaussflow {

ChartPoint random_point(const MetricFamily& metric, std::mt19937_64& rng) {
    const DomainBox box = metric.reference().domain(0);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    Vec x(metric.dim());
    for (int i = 0; i < metric.dim(); ++i) {
        const double lo = box.lo[i], hi = box.hi[i];
        double a, b;
        if (std::isfinite(lo) && std::isfinite(hi)) {
            // Middle half of bounded coordinates (away from polar singularities).
            const double pad = box.periodic[std::size_t(i)] ? 0.0 : 0.25 * (hi - lo);
            a = lo + pad;
            b = hi - pad;
        } else if (std::isfinite(lo)) {
            a = lo + 0.5;
            b = lo + 2.0;
        } else if (std::isfinite(hi)) {
            a = hi - 2.0;
            b = hi - 0.5;
        } else {
            a = -1.0;
            b = 1.0;
        }
        x[i] = a + (b - a) * uni(rng);
    }
    return ChartPoint(x, 0);
}

GrassmannPoint random_grassmann_point(const MetricFamily& metric, int m, std::mt19937_64& rng) {
    if (m < 1 || m >= metric.dim()) throw UsageError("subspace dimension must lie in [1, n - 1]");
    std::normal_distribution<double> normal;
    const ChartPoint x = random_point(metric, rng);
    Mat span(metric.dim(), m);
    for (int i = 0; i < span.rows(); ++i)
        for (int j = 0; j < m; ++j) span(i, j) = normal(rng);
    return GrassmannPoint::from_span(metric, x, 0.0, span);
}

// ============================================================================
// Connection axioms

std::vector<AxiomResiduals> connection_axiom_residuals(const BundleChart& chart, const Vec& z0,
                                                       const std::vector<double>& alphas) {
    const int D = chart.dim();
    const ChartStencilBases bases = chart_stencil_bases(chart, z0);
    const Stencil s = central_stencil(1, bases.outer.order);
    std::vector<AxiomResiduals> out;
    for (double alpha : alphas) {
        const SasakiConfig cfg{alpha};
        auto gram = [&](const std::vector<BundleVector>& basis) {
            Mat G(D, D);
            for (int B = 0; B < D; ++B)
                for (int C = B; C < D; ++C) G(B, C) = G(C, B) = sasaki_inner(chart.metric(), basis[B], basis[C], cfg);
            return G;
        };
        const Array3 G = connection_coefficients(chart, bases, cfg);
        const Mat g0 = gram(bases.basis0);
        AxiomResiduals r;
        for (int A = 0; A < D; ++A) {
            Mat dg = Mat::Zero(D, D);
            for (std::size_t k = 0; k < s.offsets.size(); ++k) {
                if (s.weights[k] == 0.0) continue;
                dg += (s.weights[k] / bases.outer.step) * gram(bases.along[std::size_t(A)].at(s.offsets[k]));
            }
            for (int B = 0; B < D; ++B)
                for (int C = 0; C < D; ++C) {
                    r.torsion = std::max(r.torsion, std::abs(G(C, A, B) - G(C, B, A)));
                    double rhs = 0.0;
                    for (int E = 0; E < D; ++E) rhs += G(E, A, B) * g0(E, C) + G(E, A, C) * g0(B, E);
                    r.compatibility = std::max(r.compatibility, std::abs(dg(B, C) - rhs));
                }
        }
        out.push_back(r);
    }
    return out;
}

CheckResult check_connection_axioms(const MetricFamily& metric, int m, const std::vector<double>& alphas, int samples,
                                    std::uint64_t seed, double tolerance) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    CheckResult r;
    r.name = "connection_axioms";
    r.tolerance = tolerance;
    double torsion = 0.0, compat = 0.0, sum = 0.0;
    int count = 0;
    for (int k = 0; k < samples; ++k) {
        const GrassmannPoint c = random_grassmann_point(metric, m, rng);
        const BundleChart chart(metric, c);
        Vec z0(chart.dim());
        for (int i = 0; i < z0.size(); ++i) z0[i] = 0.1 * normal(rng);
        for (const AxiomResiduals& a : connection_axiom_residuals(chart, z0, alphas)) {
            torsion = std::max(torsion, a.torsion);
            compat = std::max(compat, a.compatibility);
            sum += std::max(a.torsion, a.compatibility);
            ++count;
        }
    }
    r.residual_max = std::max(torsion, compat);
    r.residual_mean = count ? sum / count : 0.0;
    r.extras["torsion_max"] = torsion;
    r.extras["compatibility_max"] = compat;
    r.extras["samples"] = samples;
    finalize(r);
    return r;
}

// ============================================================================
// Script-R

VerticalHom script_R_components(const MetricFamily& metric, const GrassmannPoint& p, double t) {
    const Array4 R = riemann_tensor(metric, p.base, t);
    const Mat g = eval_metric(metric, p.base, t);
    const int n = p.n(), m = p.m(), l = p.l();
    Mat out = Mat::Zero(m, l);
    for (int j = 0; j < m; ++j)
        for (int a = 0; a < l; ++a) {
            double acc = 0.0;
            for (int i = 0; i < m; ++i)
                for (int e = 0; e < n; ++e)
                    for (int f = 0; f < n; ++f)
                        for (int b = 0; b < n; ++b)
                            for (int c = 0; c < n; ++c)
                                for (int d = 0; d < n; ++d)
                                    acc += g(e, f) * p.frame_Wperp(f, a) * R(e, b, c, d) * p.frame_W(b, i) *
                                           p.frame_W(c, j) * p.frame_W(d, i);
            out(j, a) = acc;
        }
    return VerticalHom(out);
}

CheckResult check_script_R_zero(const MetricFamily& metric, int m, int samples, std::uint64_t seed,
                                double tolerance) {
    std::mt19937_64 rng(seed);
    CheckResult r;
    r.name = "script_R_zero";
    r.tolerance = tolerance;
    double sum = 0.0;
    for (int k = 0; k < samples; ++k) {
        const GrassmannPoint p = random_grassmann_point(metric, m, rng);
        const double v = script_R(metric, p, 0.0).coeffs.cwiseAbs().maxCoeff();
        r.residual_max = std::max(r.residual_max, v);
        sum += v;
    }
    r.residual_mean = samples ? sum / samples : 0.0;
    r.extras["samples"] = samples;
    finalize(r);
    // Tolerance 0 demands exact zeros.
    if (tolerance <= 0.0) r.pass = r.residual_max == 0.0;
    return r;
}

CheckResult check_script_R_components(const MetricFamily& metric, int m, int samples, std::uint64_t seed,
                                      double tolerance) {
    std::mt19937_64 rng(seed);
    CheckResult r;
    r.name = "script_R_components";
    r.tolerance = tolerance;
    double sum = 0.0, size = 0.0;
    for (int k = 0; k < samples; ++k) {
        const GrassmannPoint p = random_grassmann_point(metric, m, rng);
        const Mat frame = script_R(metric, p, 0.0).coeffs;
        const double v = (frame - script_R_components(metric, p, 0.0).coeffs).cwiseAbs().maxCoeff();
        r.residual_max = std::max(r.residual_max, v);
        size = std::max(size, frame.cwiseAbs().maxCoeff());
        sum += v;
    }
    r.residual_mean = samples ? sum / samples : 0.0;
    r.extras["samples"] = samples;
    r.extras["script_R_max"] = size;
    finalize(r);
    return r;
}

}  // namespace gaussflow
