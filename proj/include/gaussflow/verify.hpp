// verify.hpp - independent oracles, residual checks and convergence studies.
//
// Every check compares a closed-form evaluation against a route that shares
// no formula with it (chart Christoffel symbols, time differences of the
// Gauss map, lattice derivatives of the Gauss map differential, component
// sums of the curvature tensor) and reports max/mean residuals per level.

#pragma once

#include "gaussflow/flow.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace gaussflow {

// ============================================================================
// Reports

struct LevelResidual {
    std::string label;
    double h = 0.0;   // largest parameter spacing (0 when not mesh-based)
    double dt = 0.0;  // time step (0 when static)
    double residual_max = 0.0;
    double residual_mean = 0.0;
};

struct CheckResult {
    std::string name;
    double residual_max = 0.0;   // at the base level
    double residual_mean = 0.0;
    std::size_t base = 0;         // index in `levels` of the problem's own resolution
    std::optional<double> order;  // smallest observed order between levels
    double tolerance = 0.0;       // on residual_max; <= 0: none
    double order_floor = 0.0;     // <= 0: none
    bool pass = false;
    bool flagged = false;         // non-monotone levels
    std::vector<LevelResidual> levels;
    std::vector<std::optional<double>> orders;  // per successive pair
    std::map<std::string, double> extras;       // supporting quantities
    std::string note;
};

struct VerificationReport {
    std::string scenario;
    std::vector<CheckResult> checks;
    double runtime = 0.0;  // seconds

    bool pass() const;
    const CheckResult& check(const std::string& name) const;
    // Appends a check; throws UsageError if its name is already present.
    void add(CheckResult result);
};

// Wall-clock runtime is optional so that reports of identical runs can be
// compared byte for byte.
std::string report_json(const VerificationReport& report, int indent = 2, bool include_runtime = true);
std::string summary_table(const VerificationReport& report);

// Residuals below this are treated as rounding; no order is reported for
// pairs that reach it.
constexpr double kRoundingFloor = 1e-13;

// Fills levels-derived fields (base residuals, orders, flag, pass) of a
// result whose `levels` are ordered coarse to fine.
void finalize(CheckResult& result);

// Runs `level_run(k)` for k = first .. first + levels - 1 and finalizes; the
// tolerance applies to level 0 (the base) when it is among them.
CheckResult convergence_study(const std::string& name, const std::function<LevelResidual(int level)>& level_run,
                              int levels, double tolerance, double order_floor, int first = 0);

// ============================================================================
// Problems: metric, immersion and discretization with refinement

struct Problem {
    Problem(std::string id, MetricFamily metric, ParametrizationPtr param);

    std::string id;
    MetricFamily metric;
    ParametrizationPtr param;
    std::array<int, 2> counts{64, 1};
    int stencil_order = 2;
    bool analytic_jets = false;  // AnalyticImmersion instead of a lattice mesh
    double t0 = 0.0;
    double dt = 1e-4;
    int steps = 10;              // flow steps at the base level
    Integrator integrator = Integrator::rk4;
    SasakiConfig sasaki;
    bool neumann_edges = true;   // applied when some parameter axis is bounded

    int ell() const { return param->domain().dim; }
    ParamGrid grid() const;
    ImmersionMesh mesh() const;
    AnalyticImmersion analytic() const;
    FlowState state() const;
    VelocityField velocity() const;
    double spacing() const;
    double t_end() const { return t0 + steps * dt; }

    // Level k: periodic counts x 2^k, bounded (n - 1) 2^k + 1, dt / 2^k,
    // steps x 2^k (same final time). Negative levels coarsen and throw
    // UsageError when the counts or steps do not divide.
    Problem refined(int level) const;
};

// ============================================================================
// Chart oracle for the Gauss map tension

struct OracleConfig {
    double param_step = 1e-2;    // parameter differences of the chart coordinates
    DiffConfig chart{1e-3, 4};   // differences of the Sasaki metric components
    DiffConfig basis{1e-4, 4};   // coordinate velocities
    int geodesic_steps = 16;
};

// Tension of the Gauss map at a node of an analytic immersion from first
// principles: chart coordinates of gamma by chart inversion, Sasaki metric
// components g(d_A, d_B) from sasaki_inner on coordinate velocities, their
// Christoffel symbols by differences, and trace_{F^* g} of nabla d gamma.
// Attached to the same point and frames as tension_field_gauss. Throws
// ChartError when the stencil leaves the chart.
BundleVector oracle_tension_via_chart(const MetricFamily& metric, const AnalyticImmersion& imm, double t, int node,
                                      const SasakiConfig& cfg = {}, const OracleConfig& oc = {});

// |closed - oracle| / max(|closed|, 1) in the Sasaki norm at the given nodes.
CheckResult check_oracle_tension(const Problem& problem, const std::vector<int>& nodes, double tolerance = 1e-5);

// ============================================================================
// Connection axioms

struct AxiomResiduals {
    double torsion = 0.0;        // max |G(C, A, B) - G(C, B, A)|
    double compatibility = 0.0;  // max |d_A g(d_B, d_C) - g(nabla_A d_B, d_C) - g(d_B, nabla_A d_C)|
};

// Residuals at z0 of a chart for each Sasaki scaling (coordinate velocities shared).
std::vector<AxiomResiduals> connection_axiom_residuals(const BundleChart& chart, const Vec& z0,
                                                       const std::vector<double>& alphas);

// Random point well inside chart 0 of the metric's domain.
ChartPoint random_point(const MetricFamily& metric, std::mt19937_64& rng);
GrassmannPoint random_grassmann_point(const MetricFamily& metric, int m, std::mt19937_64& rng);

CheckResult check_connection_axioms(const MetricFamily& metric, int m, const std::vector<double>& alphas, int samples,
                                    std::uint64_t seed, double tolerance = 1e-6);

// ============================================================================
// Script-R structure

// B(j, a) = sum_i sum_{e,f,b,c,d} g_ef w_a^f R^e_bcd v_i^b v_j^c v_i^d from
// raw tensor components.
VerticalHom script_R_components(const MetricFamily& metric, const GrassmannPoint& p, double t);

// Max over random samples of |script_R|, and of |script_R - component sum|.
CheckResult check_script_R_zero(const MetricFamily& metric, int m, int samples, std::uint64_t seed,
                                double tolerance);
CheckResult check_script_R_components(const MetricFamily& metric, int m, int samples, std::uint64_t seed,
                                      double tolerance = 1e-10);

// ============================================================================
// Ruh-Vilms

// Vertical tension of the Gauss map at a node by lattice differences of the
// Gauss map differential: sum_i nabla-perp_{e_i}(d gamma(e_i))^v -
// (d gamma(nabla_{e_i} e_i))^v. Flat ambient only (the vertical part of the
// Sasaki connection is then nabla-perp); needs centered lattice neighbours.
VerticalHom lattice_tension_vertical(const Immersion& imm, const MetricFamily& metric, double t, int node,
                                     const std::vector<SecondFundamental>& field, int accuracy = 2);

// Nodes whose centered lattice stencil of the given accuracy fits.
std::vector<int> centered_nodes(const ParamGrid& grid, int accuracy);

enum class RuhVilmsMode { automatic, identity, minimal };

// identity: max |tau^v + nabla^N H| with tau^v from lattice differences;
// minimal: max |tau^v|. automatic picks minimal for affine and catenoid
// parametrizations. Throws UsageError for non-euclidean ambients.
CheckResult check_ruh_vilms(const Problem& problem, int levels = 1, double tolerance = 0.0, double order_floor = 0.0,
                            RuhVilmsMode mode = RuhVilmsMode::automatic, int first_level = 0);

// ============================================================================
// Flow identities

// Vertical Gauss map velocity at a node of s[1] by central differences of the
// Gauss maps of three states spaced by dt, in the frames of s[1].
VerticalHom gauss_velocity_fd(const MetricFamily& metric, const FlowState& s0, const FlowState& s1,
                              const FlowState& s2, int node, double dt);

// tau^v + script_R at a node of a state, in the state's Uhlenbeck frames.
VerticalHom identity_rhs(const MetricFamily& metric, const FlowState& state, int node,
                         const std::vector<SecondFundamental>& field, const SasakiConfig& cfg = {});

// Largest frame drift per unit time over a run that started at t0.
double drift_rate(const MetricFamily& metric, const FlowState& state, double t0);

// Closed form vs time differences of the Gauss map at t0 + dt for each dt.
CheckResult check_variational_field(const Problem& problem, const std::vector<double>& dts,
                                    double order_floor = 1.9);

// Residual (d gamma/dt)^v - tau^v - script_R with the left side from time
// differences of the Gauss map; extras carry the closed-form cross residuals
// and max |script_R|. Evaluated at the middle and the end of the run (steps
// must be even at every level). The time differences span time_stride steps
// on each side; a stride above one lifts the truncation error clear of the
// rounding of the Gauss map divided by dt on fine levels. Throws UsageError
// if the ambient does not solve the normalized flow.
CheckResult check_main_identity(const Problem& problem, int levels, double tolerance, double order_floor,
                                int first_level = 0, int time_stride = 1);

// Three residuals (eqC: tau^v = -grad H + Ric(nu, e) - script_R; eqD:
// variational field = -grad H + Ric(nu, e) with Q = -Ric + f g; eqE: their
// difference against tau^v + script_R) at t0 and t_end.
std::vector<CheckResult> check_proof_chain(const Problem& problem, double tolerance = 1e-8);

// Radius of a round circle or sphere band shrinking by mean curvature:
// r(t) = sqrt(r0^2 - 2 l t), compared at every step up to `fraction` of the
// extinction time.
CheckResult check_radius_law(const Problem& problem, double r0, double fraction = 0.4, double tolerance = 1e-6);

// ============================================================================
// Subsolution

// Horizontally constant function on the projectivized tangent bundle of a
// flat torus, rho(x, line) = phi(unit vector of the line), with a lower
// Hessian bound -C on the fiber.
class RhoFunction {
public:
    using Fiber = std::function<double(const Vec& unit)>;

    RhoFunction(std::string name, Fiber phi, double hessian_bound);

    static RhoFunction constant(double value);
    // sin^2 of the angle between the line and the hyperplane x_axis = 0.
    static RhoFunction sin2_fiber_angle(int axis = 1);

    const std::string& name() const { return name_; }
    double C() const { return C_; }
    double value(const GrassmannPoint& p) const;

    // Chart gradient and Hessian (with the Sasaki connection) at p.
    Vec chart_gradient(const BundleChart& chart, const Vec& z0, double step = 1e-3) const;
    Mat chart_hessian(const BundleChart& chart, const Vec& z0, const SasakiConfig& cfg, double step = 1e-3) const;

    // Largest |d rho(horizontal lift of e_a)| at random samples; throws
    // PreconditionError above `tolerance`.
    double check_horizontally_constant(const MetricFamily& metric, int samples, std::uint64_t seed,
                                       double tolerance = 1e-8) const;

private:
    std::string name_;
    Fiber phi_;
    double C_;
};

// Laplace-Beltrami of lattice node values for the induced metric.
double laplace_beltrami(const ImmersionMesh& mesh, const MetricFamily& metric, double t,
                        const std::vector<double>& values, int node);

// Returns three results: the inequality (residual = largest excess of the
// left side over C((n-1) + |A|^2), passing when <= 0), the intermediate
// equality against -trace gamma^* Hess rho (with convergence over levels),
// and the energy identity |d gamma|^2 = (n-1) + |A|^2. Throws UsageError for
// codimension > 1 or a non-flat-torus ambient.
std::vector<CheckResult> check_subsolution(const Problem& problem, const RhoFunction& rho, int levels,
                                           double order_floor = 1.9, int first_level = 0);

}  // namespace gaussflow
