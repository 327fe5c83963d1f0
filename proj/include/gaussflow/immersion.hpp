// immersion.hpp - discretized immersions, their extrinsic geometry and Gauss map.
//
// Parameters u live on a lattice (ParamGrid). An Immersion supplies 2-jets of
// F at nodes plus the neighbour jets needed to differentiate node fields; the
// geometry routines work on jets and never care whether derivatives come from
// an analytic parametrization or from mesh differences.

#pragma once

#include "gaussflow/ambient.hpp"
#include "gaussflow/fd.hpp"
#include "gaussflow/grassmann.hpp"

#include <array>
#include <memory>
#include <string>
#include <vector>

namespace gaussflow {

// Parameter domain of a parametrization, one entry per parameter axis.
struct ParamDomain {
    int dim = 1;
    std::array<double, 2> lo{0.0, 0.0};
    std::array<double, 2> hi{0.0, 0.0};
    std::array<bool, 2> periodic{false, false};
};

// Lattice over a parameter domain; axis 1 varies fastest in node numbering.
// Periodic axes omit the duplicate endpoint.
struct ParamGrid {
    ParamDomain domain;
    std::array<int, 2> counts{1, 1};

    static ParamGrid over(const ParamDomain& domain, int n0, int n1 = 1);

    int dim() const { return domain.dim; }
    int node_count() const { return counts[0] * counts[1]; }
    double spacing(int axis) const;
    std::array<int, 2> index(int node) const { return {node / counts[1], node % counts[1]}; }
    int node(int i0, int i1) const { return i0 * counts[1] + i1; }
    Vec param(int node) const;

    // Node shifted by k along an axis; -1 when it falls off a bounded edge.
    int shifted(int node, int axis, int k) const;
};

// F, its first derivatives d1 (n x l, column i = dF/du_i) and second
// derivatives d2[i * l + j] at one parameter point.
struct ImmersionJet {
    ChartPoint point;
    Mat d1;
    std::vector<Vec> d2;

    const Vec& second(int i, int j) const { return d2[std::size_t(i * d1.cols() + j)]; }
};

// ============================================================================
// Analytic parametrizations

class Parametrization {
public:
    virtual ~Parametrization() = default;

    virtual std::string name() const = 0;
    virtual int ambient_dim() const = 0;
    virtual ParamDomain domain() const = 0;
    virtual ImmersionJet jet(const Vec& u) const = 0;
    ChartPoint value(const Vec& u) const { return jet(u).point; }
};

using ParametrizationPtr = std::shared_ptr<const Parametrization>;

// Catalog. Curves and surfaces in euclidean/flat-torus charts use Cartesian
// coordinates; sphere-valued ones use the polar chart (theta, phi) of the
// round sphere, and torus_product the chart (theta1, phi1, theta2, phi2).
ParametrizationPtr circle(double r, double cx = 0.0, double cy = 0.0);
ParametrizationPtr ellipse(double a, double b, double cx = 0.0, double cy = 0.0);
ParametrizationPtr perturbed_circle(double r, double eps, int mode, double cx = 0.0, double cy = 0.0);
ParametrizationPtr great_circle();
ParametrizationPtr perturbed_great_circle(double eps, int mode);
// Band theta in [pi/2 - half_width, pi/2 + half_width] of the sphere of radius r in R^3.
ParametrizationPtr sphere(double r, double half_width = 0.5);
ParametrizationPtr cylinder(double r, double half_height = 1.0);
// Graph of c0 + (cxx x^2 + 2 cxy x y + cyy y^2) / 2 over [-half, half]^2 in R^3.
ParametrizationPtr graph(double c0, double cxx, double cxy, double cyy, double half = 1.0);
// p0 + u a (+ v b) with the given direction columns; parameters in [-1, 1].
ParametrizationPtr affine(const Vec& p0, const Mat& directions);
ParametrizationPtr catenoid(double c, double half_height = 1.0);
// Product of latitude circles at colatitudes theta1, theta2 in S^2 x S^2.
ParametrizationPtr torus_product(double theta1 = 1.5707963267948966, double theta2 = 1.5707963267948966);
// Torus of great circles with colatitudes pi/2 + eps sin(mode u + v) and
// pi/2 + eps sin(u - mode v); the mixing makes the normal planes non-split.
ParametrizationPtr perturbed_torus(double eps, int mode);

// ============================================================================
// Immersions: jets at nodes and neighbour rules

// Jet at a neighbour sample with the weight (already divided by the step) of
// a first-derivative stencil. node is -1 for off-lattice samples.
struct WeightedJet {
    int node = -1;
    double weight = 0.0;
    ImmersionJet jet;
};

class Immersion {
public:
    virtual ~Immersion() = default;

    virtual const ParamGrid& grid() const = 0;
    virtual int ambient_dim() const = 0;
    int ell() const { return grid().dim(); }
    int codim() const { return ambient_dim() - ell(); }

    virtual ImmersionJet jet(const MetricFamily& metric, int node) const = 0;

    // Samples differentiating a field along F in the direction of `axis`.
    virtual std::vector<WeightedJet> derivative_jets(const MetricFamily& metric, int node, int axis) const = 0;

    // Reference vectors whose normal projections fix the normal-frame gauge
    // when the codimension exceeds one. Empty: choose from the first node.
    const Mat& normal_reference() const { return normal_reference_; }
    void set_normal_reference(Mat ref) { normal_reference_ = std::move(ref); }

private:
    Mat normal_reference_;
};

// Evaluates a parametrization at lattice nodes; neighbour jets come from
// central differences of step `delta` in parameter space.
class AnalyticImmersion : public Immersion {
public:
    AnalyticImmersion(ParametrizationPtr param, ParamGrid grid, double delta = 1e-3, int order = 4);

    const ParamGrid& grid() const override { return grid_; }
    int ambient_dim() const override { return param_->ambient_dim(); }
    const Parametrization& parametrization() const { return *param_; }

    ImmersionJet jet(const MetricFamily& metric, int node) const override;
    std::vector<WeightedJet> derivative_jets(const MetricFamily& metric, int node, int axis) const override;

private:
    ParametrizationPtr param_;
    ParamGrid grid_;
    double delta_;
    int order_;
};

// Node values of F with derivatives by lattice differences: central in the
// interior and across periodic seams, one-sided fitted stencils at bounded
// edges. Differences use the ambient displacement, so periodic ambient
// coordinates wrap consistently.
class ImmersionMesh : public Immersion {
public:
    ImmersionMesh(ParamGrid grid, std::vector<ChartPoint> values, int ambient_dim, int stencil_order = 2);
    static ImmersionMesh sample(const Parametrization& param, const ParamGrid& grid, int stencil_order = 2);

    const ParamGrid& grid() const override { return grid_; }
    int ambient_dim() const override { return n_; }
    int stencil_order() const { return order_; }

    const std::vector<ChartPoint>& values() const { return values_; }
    const ChartPoint& value(int node) const { return values_[std::size_t(node)]; }
    void set_value(int node, ChartPoint x) { values_[std::size_t(node)] = std::move(x); }

    ImmersionJet jet(const MetricFamily& metric, int node) const override;
    std::vector<WeightedJet> derivative_jets(const MetricFamily& metric, int node, int axis) const override;

    // Lattice stencil (node indices and weights / h^deriv) along one axis.
    struct NodeStencil {
        std::vector<int> nodes;
        std::vector<double> weights;
    };
    const NodeStencil& stencil(int node, int axis, int deriv) const;

    // Largest jump of a periodic direction across its seam relative to the
    // typical neighbour spacing (continuity check for imported meshes).
    double seam_ratio(const MetricFamily& metric) const;

private:
    NodeStencil build_stencil(int node, int axis, int deriv) const;

    ParamGrid grid_;
    std::vector<ChartPoint> values_;
    int n_;
    int order_;
    // Stencils by (node, axis, deriv); entries that do not fit stay empty.
    std::shared_ptr<const std::vector<NodeStencil>> stencils_;
};

// Node table import/export. Format:
//   # gaussflow.mesh/1
//   dim,<l>            ambient,<n>        chart,<id>
//   counts,<n0>[,<n1>] lo,...  hi,...  periodic,<0|1>[,<0|1>]
//   x0,...,x{n-1}      one row per node in node order
ImmersionMesh read_mesh_csv(const std::string& path, int stencil_order = 2);
void write_mesh_csv(const ImmersionMesh& mesh, const std::string& path);

// ============================================================================
// Extrinsic geometry

// Frames and second fundamental form at one point. A(i, j, a) is the
// coefficient g(A(e_i, e_j), nu_a); A_vec[i * l + j] the ambient vector.
struct SecondFundamental {
    ChartPoint point;
    double time = 0.0;
    Mat induced;   // l x l induced metric in parameter coordinates
    Mat tangent;   // l x l, column i = e_i in parameter space
    Mat pushed;    // n x l, column i = F_* e_i
    Mat normal;    // n x m
    Array3 A;      // l x l x m
    std::vector<Vec> A_vec;
    Vec H;         // ambient mean curvature vector
    Vec H_coeffs;  // g(H, nu_a)

    int ell() const { return int(pushed.cols()); }
    int codim() const { return int(normal.cols()); }
    const Vec& A_at(int i, int j) const { return A_vec[std::size_t(i * ell() + j)]; }
    double A_norm2() const;
};

// Frames only (A, H left empty). Throws DegeneracyError on rank loss.
SecondFundamental induced_frames(const MetricFamily& metric, double t, const ImmersionJet& jet,
                                 const Mat& normal_reference = Mat());
SecondFundamental second_fundamental_form(const MetricFamily& metric, double t, const ImmersionJet& jet,
                                          const Mat& normal_reference = Mat());

// Same with the connection at the jet's point already evaluated.
SecondFundamental second_fundamental_form(const ConnectionData& c, double t, const ImmersionJet& jet,
                                          const Mat& normal_reference = Mat());

SecondFundamental induced_frames(const Immersion& imm, const MetricFamily& metric, double t, int node);
SecondFundamental second_fundamental_form(const Immersion& imm, const MetricFamily& metric, double t, int node);

// Normal-frame reference of an immersion at time t (empty in codimension 1).
Mat normal_reference_for(const Immersion& imm, const MetricFamily& metric, double t);

// Second fundamental form at every node (evaluated concurrently).
std::vector<SecondFundamental> second_fundamental_field(const Immersion& imm, const MetricFamily& metric, double t);

// B(j, k) = g(nu_j, nabla_{e_k} H): the normal gradient of H as coefficients
// in Hom(normal, tangent). `field` optionally caches lattice-node geometry.
VerticalHom normal_gradient_H(const Immersion& imm, const MetricFamily& metric, double t, int node,
                              const std::vector<SecondFundamental>* field = nullptr);

// Normal gradient of an arbitrary normal-valued node field V (for general
// variations): B(j, k) = g(nu_j, nabla_{e_k} V). `values` holds V at every
// lattice node, so the immersion's neighbour samples must be lattice nodes.
VerticalHom normal_gradient(const Immersion& imm, const MetricFamily& metric, double t, int node,
                            const std::vector<Vec>& values);

// ============================================================================
// Gauss map

using GaussMapField = std::vector<GrassmannPoint>;

// W = normal space, frame_Wperp = pushed tangent frame.
GrassmannPoint gauss_point(const SecondFundamental& sff);
GaussMapField gauss_map(const Immersion& imm, const MetricFamily& metric, double t);

// dgamma(e_i): horizontal e-bar_i, vertical B(j, k) = -A(i, k, j).
BundleVector gauss_map_differential(const SecondFundamental& sff, int i);

// Sum_i |dgamma(e_i)|^2 in the Sasaki metric (alpha scales the vertical part).
double gauss_energy_density(const SecondFundamental& sff, const SasakiConfig& cfg = {});

// Tension of the Gauss map from the closed form: horizontal
// H + alpha sum_{i,k} R(A(e_k, e_i), e_k, e_i, .)^sharp, vertical
// -(nabla^N H) + sum_{i} g(R(e_i, nu_j) e_k, e_i).
BundleVector tension_field_gauss(const Immersion& imm, const MetricFamily& metric, double t, int node,
                                 const SasakiConfig& cfg = {},
                                 const std::vector<SecondFundamental>* field = nullptr);

// Same, given precomputed node geometry and normal gradient of H.
BundleVector tension_from_parts(const SecondFundamental& sff, const CurvatureData& cd, const VerticalHom& grad_H,
                                const SasakiConfig& cfg = {});

// B(j, k) = Ric(nu_j, e-bar_k).
VerticalHom ricci_normal_tangent(const SecondFundamental& sff, const CurvatureData& cd);

}  // namespace gaussflow
