// problem.cpp - discretized problems with (h, dt) refinement.

#include "gaussflow/verify.hpp"

#include <algorithm>
#include <cmath>

namespace gaussflow {

Problem::Problem(std::string id_, MetricFamily metric_, ParametrizationPtr param_)
    : id(std::move(id_)), metric(std::move(metric_)), param(std::move(param_)) {
    if (!param) throw UsageError("problem needs a parametrization");
    if (param->ambient_dim() != metric.dim())
        throw ConfigError("immersion ambient dimension " + std::to_string(param->ambient_dim()) +
                          " does not match the metric dimension " + std::to_string(metric.dim()));
}

ParamGrid Problem::grid() const {
    return ParamGrid::over(param->domain(), counts[0], ell() > 1 ? counts[1] : 1);
}

ImmersionMesh Problem::mesh() const { return ImmersionMesh::sample(*param, grid(), stencil_order); }

AnalyticImmersion Problem::analytic() const { return AnalyticImmersion(param, grid()); }

FlowState Problem::state() const { return initial_state(metric, mesh(), t0); }

VelocityField Problem::velocity() const {
    VelocityField v = mean_curvature_velocity(metric);
    const ParamDomain d = param->domain();
    bool bounded = false;
    for (int a = 0; a < d.dim; ++a) bounded = bounded || !d.periodic[std::size_t(a)];
    return bounded && neumann_edges ? with_neumann_edges(v, metric) : v;
}

double Problem::spacing() const {
    const ParamGrid g = grid();
    double h = 0.0;
    for (int a = 0; a < g.dim(); ++a) h = std::max(h, g.spacing(a));
    return h;
}

Problem Problem::refined(int level) const {
    Problem p = *this;
    if (level == 0) return p;
    const ParamDomain d = param->domain();
    // Scales n by 2^level exactly or fails.
    auto scale = [&](int n, const char* what) {
        if (level > 0) return n << level;
        const int f = 1 << -level;
        if (n % f != 0)
            throw UsageError(std::string("cannot coarsen ") + what + " " + std::to_string(n) + " by " + std::to_string(f));
        return n / f;
    };
    for (int a = 0; a < d.dim; ++a) {
        int& c = p.counts[std::size_t(a)];
        c = d.periodic[std::size_t(a)] ? scale(c, "node count") : scale(c - 1, "node intervals") + 1;
    }
    p.dt = std::ldexp(dt, -level);
    p.steps = scale(steps, "step count");
    return p;
}

}  // namespace gaussflow
