// flow.hpp - coupled metric/mean curvature flow with Uhlenbeck frames.
//
// The metric follows its family's closed-form scale law, the immersion moves
// with velocity V (mean curvature by default), and at every node a tangent
// frame e_i (parameter space) and a normal frame nu_j (chart components) are
// carried along by the frame ODEs that keep them orthonormal for F_t^* g_t and
// g_t respectively.

#pragma once

#include "gaussflow/immersion.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace gaussflow {

struct NodeFrames {
    Mat tangent;  // l x l, column i = e_i in parameter space
    Mat normal;   // n x m, column j = nu_j
};

struct FlowState {
    double t = 0.0;
    ImmersionMesh mesh;
    std::vector<NodeFrames> frames;
    std::vector<double> metric_scale;  // c_b(t) per scale block
};

// State at time t with frames taken from the mesh geometry.
FlowState initial_state(const MetricFamily& metric, ImmersionMesh mesh, double t = 0.0);

enum class Integrator { euler, rk4 };

std::string to_string(Integrator integrator);
Integrator integrator_from_string(const std::string& name);

// Node velocities V of the immersion at time t; the default is V = H.
using VelocityField = std::function<std::vector<Vec>(const ImmersionMesh& mesh, double t)>;

std::vector<Vec> mcf_velocity(const MetricFamily& metric, const ImmersionMesh& mesh, double t);
VelocityField mean_curvature_velocity(const MetricFamily& metric);

// Boundary rule for open patches: at nodes on bounded parameter edges the
// velocity is replaced by its normal part with normal components extended
// from the interior with zero derivative across the edge (fourth-order
// one-sided formula). One-sided second differences at an edge are
// anti-diffusive, so the unmodified flow of a bounded patch blows up. The
// shrinking sphere band (edges sliding on radial cones) satisfies the rule.
VelocityField with_neumann_edges(VelocityField base, const MetricFamily& metric);

// ============================================================================
// Kinematics at one node

// Everything the frame equations need at a node: the jet of F, connection
// data and Q = dg/dt at time t, the velocity V, nabla_t F_a = D_a V +
// Gamma(V, F_a) (column a) and P = d/dt (F^* g) in parameter coordinates.
struct NodeKinematics {
    ImmersionJet jet;
    ConnectionData conn;
    Mat Q;
    Vec V;
    Mat nabla_t_dF;
    Mat induced;
    Mat P;
};

NodeKinematics node_kinematics(const MetricFamily& metric, const ImmersionMesh& mesh, double t,
                               const std::vector<Vec>& velocity, int node);
// Same reusing the node's jet and connection.
NodeKinematics node_kinematics(const MetricFamily& metric, const ImmersionMesh& mesh, double t,
                               const std::vector<Vec>& velocity, int node, ImmersionJet jet, ConnectionData conn);

// d e_i / dt = -1/2 (P(e_i, .))^sharp for the induced metric.
Vec uhlenbeck_tangent_rhs(const NodeKinematics& k, const NodeFrames& f, int i);

// nabla_t e-bar_k = (nabla_t F_a) e_k^a + F_a d e_k^a / dt.
Vec time_derivative_pushed(const NodeKinematics& k, const NodeFrames& f, int i);

// nabla_t nu_j = -1/2 ((Q nu_j)^sharp)^perp - sum_k Q(nu_j, e-bar_k) e-bar_k
//               - sum_k g(nu_j, nabla_t e-bar_k) e-bar_k.
Vec uhlenbeck_normal_covariant(const NodeKinematics& k, const NodeFrames& f, int j);

// Chart-component rate d nu_j / dt = nabla_t nu_j - Gamma(V, nu_j).
Vec uhlenbeck_normal_rhs(const NodeKinematics& k, const NodeFrames& f, int j);

// nabla_t X = dX/dt + Gamma(V, X) given the component rate dX/dt.
Vec time_covariant_derivative(const ConnectionData& c, const Vec& velocity, const Vec& X, const Vec& dXdt);

// Same from samples of (F(t0 + k dt), X(t0 + k dt)), central differences of
// the given accuracy. Throws StencilError for a non-positive step.
struct SectionSample {
    ChartPoint point;
    Vec value;
};
Vec time_covariant_derivative(const MetricFamily& metric, double t0, double dt,
                              const std::function<SectionSample(int k)>& sample, int accuracy = 2);

// Vertical part of the Gauss map velocity in the state's frames:
// B(j, k) = -g(nu_j, nabla_{e_k} V) - Q(nu_j, e-bar_k).
VerticalHom variational_vertical(const NodeKinematics& k, const NodeFrames& f);
VerticalHom variational_vertical(const MetricFamily& metric, const FlowState& state, int node,
                                 const std::vector<Vec>& velocity);

// Gauss map point of a state node in its evolved frames.
GrassmannPoint frame_point(const MetricFamily& metric, const FlowState& state, int node);

// ============================================================================
// Time stepping

class ExtinctionError : public Error {
public:
    ExtinctionError(const std::string& what, double estimate, std::shared_ptr<const FlowState> last)
        : Error(ErrorCode::extinction, what), estimate_(estimate), last_(std::move(last)) {}

    // Extrapolated singular time from the last valid state.
    double estimate() const { return estimate_; }
    const FlowState& last_valid() const { return *last_; }

private:
    double estimate_;
    std::shared_ptr<const FlowState> last_;
};

// Advances mesh, frames and metric scale by dt. Throws ExtinctionError when
// the advanced immersion degenerates.
FlowState step(const MetricFamily& metric, const FlowState& state, double dt, Integrator integrator,
               const VelocityField& velocity = {});

// Advisory step bound for the explicit schemes: 0.7 h^2 for the smallest
// physical node spacing h (the rk4 limit of the second-order Laplacian).
// step() does not enforce it.
double stable_step(const MetricFamily& metric, const FlowState& state);

struct FrameDrift {
    double orthonormality = 0.0;  // tangent (F^* g) and normal (g) Gram residuals
    double normality = 0.0;       // max |g(nu_j, e-bar_k)|
    double max() const { return orthonormality > normality ? orthonormality : normality; }
};

FrameDrift frame_drift(const MetricFamily& metric, const FlowState& state);

// Ordered re-orthonormalization of both frames (normals re-projected first).
void reorthonormalize(const MetricFamily& metric, FlowState& state);

struct FlowOptions {
    double dt = 1e-4;
    Integrator integrator = Integrator::rk4;
    int reorthonormalize_every = 100;
    double drift_limit = 1e-6;
    int record_every = 1;
};

struct FlowRecord {
    int step = 0;
    double t = 0.0;
    double metric_scale = 1.0;  // first scale block
    double min_H = 0.0;
    double max_H = 0.0;
    double frame_drift = 0.0;
    double normality_drift = 0.0;
};

struct FlowRun {
    FlowState final_state;
    std::vector<FlowRecord> series;
    double max_drift = 0.0;       // largest drift seen before any correction
    double max_drift_rate = 0.0;  // drift per unit time between corrections
    bool drift_ok = true;         // max_drift <= drift_limit
};

// Integrates until t_end (last step shortened to land on it). `observer`
// sees every accepted state.
FlowRun integrate(const MetricFamily& metric, FlowState state, double t_end, const FlowOptions& options,
                  const VelocityField& velocity = {},
                  const std::function<void(const FlowState&)>& observer = {});

void write_timeseries_csv(const std::vector<FlowRecord>& series, const std::string& path);

}  // namespace gaussflow
