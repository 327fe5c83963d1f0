// ruh_vilms.cpp - Gauss map tension by lattice differences in flat ambients.

#include "gaussflow/verify.hpp"

#include "gaussflow/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

namespace gaussflow {

std::vector<int> centered_nodes(const ParamGrid& grid, int accuracy) {
    const int half = accuracy / 2;
    std::vector<int> out;
    for (int v = 0; v < grid.node_count(); ++v) {
        const auto idx = grid.index(v);
        bool ok = true;
        for (int a = 0; a < grid.dim(); ++a) {
            if (grid.domain.periodic[std::size_t(a)]) continue;
            const int i = idx[std::size_t(a)], n = grid.counts[std::size_t(a)];
            ok = ok && i >= half && i < n - half;
        }
        if (ok) out.push_back(v);
    }
    return out;
}

VerticalHom lattice_tension_vertical(const Immersion& imm, const MetricFamily& metric, double t, int node,
                                     const std::vector<SecondFundamental>& field, int accuracy) {
    const ParamGrid& grid = imm.grid();
    const int l = imm.ell();
    const SecondFundamental& s0 = field[std::size_t(node)];
    const int m = s0.codim();
    const ConnectionData conn = connection(metric, s0.point, t);
    const Mat d1 = imm.jet(metric, node).d1;
    const Stencil st = central_stencil(1, accuracy);

    auto neighbour = [&](int axis, double s, double h) {
        const int q = grid.shifted(node, axis, int(std::lround(s / h)));
        if (q < 0) throw StencilError("lattice tension needs centered neighbours at node " + std::to_string(node));
        return q;
    };

    Mat tau = Mat::Zero(m, l);
    for (int i = 0; i < l; ++i) {
        // nabla-perp of Y_i = (d gamma(e_i))^v and nabla of e-bar_i along each axis.
        Mat nabla_Y = Mat::Zero(m, l);
        Vec nabla_e = Vec::Zero(s0.point.dim());
        for (int a = 0; a < l; ++a) {
            const double h = grid.spacing(a);
            const double w_dir = s0.tangent(a, i);
            const VerticalCurve Y = [&](double s) {
                const SecondFundamental& sq = field[std::size_t(neighbour(a, s, h))];
                return VerticalSample{gauss_point(sq), gauss_map_differential(sq, i).vertical};
            };
            nabla_Y += w_dir * nabla_perp(metric, Y, DiffConfig{h, accuracy}).coeffs;
            Vec de = Vec::Zero(s0.point.dim());
            for (std::size_t k = 0; k < st.offsets.size(); ++k) {
                if (st.weights[k] == 0.0) continue;
                de += (st.weights[k] / h) * field[std::size_t(neighbour(a, st.offsets[k] * h, h))].pushed.col(i);
            }
            nabla_e += w_dir * (de + contract_christoffel(conn.christoffel, d1.col(a), s0.pushed.col(i)));
        }
        tau += nabla_Y;
        // Subtract d gamma(nabla_{e_i} e_i): its tangent coefficients times -A(k, ., .).
        const Vec low = conn.metric * nabla_e;
        for (int k = 0; k < l; ++k) {
            const double c = low.dot(s0.pushed.col(k));
            tau -= c * gauss_map_differential(s0, k).vertical.coeffs;
        }
    }
    return VerticalHom(tau);
}

CheckResult check_ruh_vilms(const Problem& problem, int levels, double tolerance, double order_floor,
                            RuhVilmsMode mode, int first_level) {
    if (problem.metric.kind() != MetricKind::euclidean)
        throw UsageError("the Ruh-Vilms check needs a euclidean ambient");
    if (mode == RuhVilmsMode::automatic) {
        const std::string name = problem.param->name();
        mode = (name == "catenoid" || name.rfind("affine", 0) == 0) ? RuhVilmsMode::minimal : RuhVilmsMode::identity;
    }
    const bool minimal = mode == RuhVilmsMode::minimal;
    double closed_max = 0.0;
    const int accuracy = problem.stencil_order;
    auto level = [&](int k) {
        const Problem p = problem.refined(k);
        std::unique_ptr<Immersion> imm;
        if (p.analytic_jets)
            imm = std::make_unique<AnalyticImmersion>(p.analytic());
        else
            imm = std::make_unique<ImmersionMesh>(p.mesh());
        const double t = p.t0;
        const std::vector<SecondFundamental> field = second_fundamental_field(*imm, p.metric, t);
        const std::vector<int> nodes = centered_nodes(imm->grid(), accuracy);
        if (nodes.empty()) throw StencilError("no node has a centered stencil");
        std::vector<double> res(nodes.size()), closed(nodes.size());
        parallel_for(int(nodes.size()), [&](int q) {
            const int v = nodes[std::size_t(q)];
            const Mat tau = lattice_tension_vertical(*imm, p.metric, t, v, field, accuracy).coeffs;
            const Mat grad = normal_gradient_H(*imm, p.metric, t, v, &field).coeffs;
            res[std::size_t(q)] = minimal ? tau.norm() : (tau + grad).norm();
            closed[std::size_t(q)] = grad.norm();
        });
        LevelResidual out;
        char label[96];
        std::snprintf(label, sizeof label, "%dx%d nodes", p.counts[0], p.ell() > 1 ? p.counts[1] : 1);
        out.label = label;
        out.h = p.spacing();
        for (std::size_t q = 0; q < res.size(); ++q) {
            out.residual_max = std::max(out.residual_max, res[q]);
            out.residual_mean += res[q] / double(res.size());
            closed_max = std::max(closed_max, closed[q]);
        }
        return out;
    };
    CheckResult r = convergence_study(minimal ? "ruh_vilms_minimal" : "ruh_vilms_identity", level, levels, tolerance,
                                      order_floor, first_level);
    r.extras["grad_H_max"] = closed_max;
    r.note = minimal ? "max |tau^v| by lattice differences of d gamma over nodes with centered stencils"
                     : "max |tau^v + nabla^N H| over nodes with centered stencils";
    return r;
}

}  // namespace gaussflow
