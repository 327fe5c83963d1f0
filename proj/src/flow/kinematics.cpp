// kinematics.cpp - node kinematics, Uhlenbeck frame equations and the Gauss map velocity.

#include "gaussflow/flow.hpp"
#include "gaussflow/fd.hpp"

namespace gaussflow {

std::vector<Vec> mcf_velocity(const MetricFamily& metric, const ImmersionMesh& mesh, double t) {
    const std::vector<SecondFundamental> field = second_fundamental_field(mesh, metric, t);
    std::vector<Vec> out;
    out.reserve(field.size());
    for (const SecondFundamental& s : field) out.push_back(s.H);
    return out;
}

VelocityField mean_curvature_velocity(const MetricFamily& metric) {
    return [metric](const ImmersionMesh& mesh, double t) { return mcf_velocity(metric, mesh, t); };
}

VelocityField with_neumann_edges(VelocityField base, const MetricFamily& metric) {
    return [base = std::move(base), metric](const ImmersionMesh& mesh, double t) {
        std::vector<Vec> V = base(mesh, t);
        const std::vector<Vec> interior = V;
        const ParamGrid& grid = mesh.grid();
        const Mat ref = normal_reference_for(mesh, metric, t);
        // Zero-slope extrapolation: f0 = (48 f1 - 36 f2 + 16 f3 - 3 f4) / 25.
        const double w[4] = {48.0 / 25, -36.0 / 25, 16.0 / 25, -3.0 / 25};
        for (int axis = 0; axis < grid.dim(); ++axis) {
            if (grid.domain.periodic[axis]) continue;
            if (grid.counts[axis] < 5) throw StencilError("edge rule needs five nodes across the patch");
            for (int v = 0; v < grid.node_count(); ++v) {
                const int i = grid.index(v)[axis];
                const int dir = i == 0 ? 1 : (i == grid.counts[axis] - 1 ? -1 : 0);
                if (dir == 0) continue;
                const SecondFundamental f0 = induced_frames(metric, t, mesh.jet(metric, v), ref);
                Vec coeffs = Vec::Zero(f0.codim());
                for (int j = 1; j <= 4; ++j) {
                    const int nb = grid.shifted(v, axis, dir * j);
                    const SecondFundamental fj = induced_frames(metric, t, mesh.jet(metric, nb), ref);
                    const Mat gj = eval_metric(metric, fj.point, t);
                    coeffs += w[j - 1] * (fj.normal.transpose() * gj * interior[std::size_t(nb)]);
                }
                V[std::size_t(v)] = f0.normal * coeffs;
            }
        }
        return V;
    };
}

NodeKinematics node_kinematics(const MetricFamily& metric, const ImmersionMesh& mesh, double t,
                               const std::vector<Vec>& velocity, int node) {
    ImmersionJet jet = mesh.jet(metric, node);
    ConnectionData conn = connection(metric, jet.point, t);
    return node_kinematics(metric, mesh, t, velocity, node, std::move(jet), std::move(conn));
}

NodeKinematics node_kinematics(const MetricFamily& metric, const ImmersionMesh& mesh, double t,
                               const std::vector<Vec>& velocity, int node, ImmersionJet jet, ConnectionData conn) {
    if (int(velocity.size()) != mesh.grid().node_count()) throw UsageError("kinematics: one velocity per node required");
    NodeKinematics k;
    k.jet = std::move(jet);
    k.conn = std::move(conn);
    k.Q = metric_time_derivative(metric, k.jet.point, t);
    k.V = velocity[std::size_t(node)];
    const int n = mesh.ambient_dim(), l = mesh.ell();
    // nabla_t F_a = nabla_a V: the lattice difference of V matches the one
    // that produced F_a, so the semi-discrete frame equations are exact.
    k.nabla_t_dF = Mat::Zero(n, l);
    for (int a = 0; a < l; ++a) {
        const ImmersionMesh::NodeStencil& s = mesh.stencil(node, a, 1);
        for (std::size_t q = 0; q < s.nodes.size(); ++q) k.nabla_t_dF.col(a) += s.weights[q] * velocity[std::size_t(s.nodes[q])];
        k.nabla_t_dF.col(a) += contract_christoffel(k.conn.christoffel, k.V, k.jet.d1.col(a));
    }
    const Mat& g = k.conn.metric;
    const Mat& d1 = k.jet.d1;
    k.induced = d1.transpose() * g * d1;
    const Mat cross = k.nabla_t_dF.transpose() * g * d1;
    k.P = d1.transpose() * k.Q * d1 + cross + cross.transpose();
    return k;
}

Vec uhlenbeck_tangent_rhs(const NodeKinematics& k, const NodeFrames& f, int i) {
    return -0.5 * k.induced.ldlt().solve(k.P * f.tangent.col(i));
}

Vec time_derivative_pushed(const NodeKinematics& k, const NodeFrames& f, int i) {
    return k.nabla_t_dF * f.tangent.col(i) + k.jet.d1 * uhlenbeck_tangent_rhs(k, f, i);
}

Vec uhlenbeck_normal_covariant(const NodeKinematics& k, const NodeFrames& f, int j) {
    const Mat& g = k.conn.metric;
    const Mat& d1 = k.jet.d1;
    const Vec nu = f.normal.col(j);
    // Normal projection of (Q(nu, .))^sharp.
    const Vec w = k.conn.inverse * (k.Q * nu);
    const Vec perp = w - d1 * k.induced.ldlt().solve(d1.transpose() * (g * w));
    Vec out = -0.5 * perp;
    for (int q = 0; q < int(f.tangent.cols()); ++q) {
        const Vec ebar = d1 * f.tangent.col(q);
        const Vec debar = time_derivative_pushed(k, f, q);
        out -= (nu.dot(k.Q * ebar) + nu.dot(g * debar)) * ebar;
    }
    return out;
}

Vec uhlenbeck_normal_rhs(const NodeKinematics& k, const NodeFrames& f, int j) {
    return uhlenbeck_normal_covariant(k, f, j) - contract_christoffel(k.conn.christoffel, k.V, f.normal.col(j));
}

Vec time_covariant_derivative(const ConnectionData& c, const Vec& velocity, const Vec& X, const Vec& dXdt) {
    return dXdt + contract_christoffel(c.christoffel, velocity, X);
}

Vec time_covariant_derivative(const MetricFamily& metric, double t0, double dt,
                              const std::function<SectionSample(int k)>& sample, int accuracy) {
    if (!(dt > 0.0)) throw StencilError("time derivative needs a positive time step");
    const Stencil s = central_stencil(1, accuracy);
    const SectionSample s0 = sample(0);
    Vec V = Vec::Zero(s0.point.dim());
    Vec dX = Vec::Zero(s0.value.size());
    for (std::size_t q = 0; q < s.offsets.size(); ++q) {
        if (s.weights[q] == 0.0) continue;
        const SectionSample sq = sample(s.offsets[q]);
        const double w = s.weights[q] / dt;
        V += w * metric.displacement(s0.point, sq.point);
        dX += w * sq.value;
    }
    return time_covariant_derivative(connection(metric, s0.point, t0), V, s0.value, dX);
}

VerticalHom variational_vertical(const NodeKinematics& k, const NodeFrames& f) {
    const Mat lowN = k.conn.metric * f.normal;
    const Mat ebar = k.jet.d1 * f.tangent;
    // g(nu_j, nabla_{e_k} V) with nabla_{d_a} V = nabla_t F_a.
    const Mat grad = lowN.transpose() * k.nabla_t_dF * f.tangent;
    const Mat q = f.normal.transpose() * k.Q * ebar;
    return VerticalHom(Mat(-grad - q));
}

VerticalHom variational_vertical(const MetricFamily& metric, const FlowState& state, int node,
                                 const std::vector<Vec>& velocity) {
    return variational_vertical(node_kinematics(metric, state.mesh, state.t, velocity, node),
                                state.frames[std::size_t(node)]);
}

GrassmannPoint frame_point(const MetricFamily& metric, const FlowState& state, int node) {
    const ImmersionJet jet = state.mesh.jet(metric, node);
    const NodeFrames& f = state.frames[std::size_t(node)];
    GrassmannPoint p;
    p.base = jet.point;
    p.time = state.t;
    p.frame_W = f.normal;
    p.frame_Wperp = jet.d1 * f.tangent;
    return p;
}

}  // namespace gaussflow
