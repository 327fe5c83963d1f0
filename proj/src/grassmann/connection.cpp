// connection.cpp - Levi-Civita connection of the Sasaki metric.

#include "gaussflow/grassmann.hpp"

#include <cmath>
#include <map>

namespace gaussflow {

namespace {

// Memoizes field samples so the horizontal and vertical parts share them.
class SampleCache {
public:
    explicit SampleCache(const FieldAlongCurve& f) : f_(f) {}

    const BundleVector& at(double s) {
        auto it = cache_.find(s);
        if (it == cache_.end()) it = cache_.emplace(s, f_(s)).first;
        return it->second;
    }

private:
    const FieldAlongCurve& f_;
    std::map<double, BundleVector> cache_;
};

// omega_c = k(R-perp(u, e_c), B): the 1-form xi -> k(R-perp(u, xi), B).
Vec curvature_form(const CurvatureData& cd, const Vec& u, const VerticalHom& b, const GrassmannPoint& p) {
    const int n = p.n();
    Vec omega(n);
    for (int c = 0; c < n; ++c) omega[c] = fiber_inner(r_perp(cd, u, Vec::Unit(n, c), p), b);
    return omega;
}

}  // namespace

BundleVector grassmann_connection(const MetricFamily& metric, const BundleVector& x, const FieldAlongCurve& y,
                                  const SasakiConfig& cfg, const DiffConfig& diff) {
    if (!(cfg.alpha > 0.0)) throw ConfigError("Sasaki scaling constant must be positive");
    SampleCache samples(y);
    const BundleVector& y0 = samples.at(0.0);
    if (!same_attachment(x.point, y0.point)) throw UsageError("grassmann_connection: fields attached to different points");
    const GrassmannPoint& p = x.point;

    const Stencil s = central_stencil(1, diff.order);
    Vec dYh = Vec::Zero(p.n());
    for (std::size_t k = 0; k < s.offsets.size(); ++k) {
        if (s.weights[k] == 0.0) continue;
        dYh += (s.weights[k] / diff.step) * samples.at(s.offsets[k] * diff.step).horizontal;
    }
    const CurvatureData cd = curvature(metric, p.base, p.time);
    const Vec nabla_h = dYh + contract_christoffel(cd.christoffel, x.horizontal, y0.horizontal);

    const VerticalCurve vertical_field = [&](double t) {
        const BundleVector& yt = samples.at(t);
        return VerticalSample{yt.point, yt.vertical};
    };
    const VerticalHom nabla_v = nabla_perp(metric, vertical_field, diff);

    const Vec omega = curvature_form(cd, x.horizontal, y0.vertical, p) + curvature_form(cd, y0.horizontal, x.vertical, p);
    BundleVector out;
    out.point = p;
    out.horizontal = nabla_h + 0.5 * cfg.alpha * (cd.inverse * omega);
    out.vertical = VerticalHom(nabla_v.coeffs - 0.5 * r_perp(cd, x.horizontal, y0.horizontal, p).coeffs);
    return out;
}

BundleVector grassmann_connection(const BundleChart& chart, const ChartField& x, const ChartField& y, const Vec& z0,
                                  const SasakiConfig& cfg, const DiffConfig& outer, const DiffConfig& inner) {
    const std::vector<BundleVector> basis0 = chart.coordinate_basis(z0, inner);
    const Vec dir = x(z0);
    const BundleVector xb = combine(basis0, dir);
    const FieldAlongCurve field = [&](double s) {
        if (s == 0.0) return combine(basis0, y(z0));
        const Vec z = z0 + s * dir;
        return combine(chart.coordinate_basis(z, inner), y(z));
    };
    return grassmann_connection(chart.metric(), xb, field, cfg, outer);
}

ChartStencilBases chart_stencil_bases(const BundleChart& chart, const Vec& z0, const DiffConfig& outer,
                                      const DiffConfig& inner) {
    const int D = chart.dim();
    const Stencil s = central_stencil(1, outer.order);
    ChartStencilBases out{z0, outer, chart.coordinate_basis(z0, inner), {}};
    out.along.resize(std::size_t(D));
    for (int A = 0; A < D; ++A) {
        auto& along = out.along[std::size_t(A)];
        for (std::size_t k = 0; k < s.offsets.size(); ++k) {
            if (s.offsets[k] == 0) {
                along[0] = out.basis0;
                continue;
            }
            if (s.weights[k] == 0.0) continue;
            Vec z = z0;
            z[A] += s.offsets[k] * outer.step;
            along[s.offsets[k]] = chart.coordinate_basis(z, inner);
        }
        along[0] = out.basis0;
    }
    return out;
}

Array3 connection_coefficients(const BundleChart& chart, const ChartStencilBases& bases, const SasakiConfig& cfg) {
    const int D = chart.dim();
    const DiffConfig& outer = bases.outer;
    Array3 G(D);
    for (int A = 0; A < D; ++A) {
        const auto& along = bases.along[std::size_t(A)];
        for (int B = 0; B < D; ++B) {
            const FieldAlongCurve field = [&](double t) {
                const int k = int(std::lround(t / outer.step));
                return along.at(k)[std::size_t(B)];
            };
            const BundleVector nab = grassmann_connection(chart.metric(), bases.basis0[std::size_t(A)], field, cfg, outer);
            const Vec c = components_in(bases.basis0, nab);
            for (int C = 0; C < D; ++C) G(C, A, B) = c[C];
        }
    }
    return G;
}

Array3 connection_coefficients(const BundleChart& chart, const Vec& z0, const SasakiConfig& cfg,
                               const DiffConfig& outer, const DiffConfig& inner) {
    return connection_coefficients(chart, chart_stencil_bases(chart, z0, outer, inner), cfg);
}

}  // namespace gaussflow
