// subsolution.cpp - horizontally constant fiber functions and the heat inequality.

#include "gaussflow/verify.hpp"

#include "gaussflow/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

namespace gaussflow {

RhoFunction::RhoFunction(std::string name, Fiber phi, double hessian_bound)
    : name_(std::move(name)), phi_(std::move(phi)), C_(hessian_bound) {
    if (!phi_) throw UsageError("fiber function is empty");
    if (!(C_ >= 0.0)) throw ConfigError("Hessian bound constant must be non-negative");
}

RhoFunction RhoFunction::constant(double value) {
    return RhoFunction("constant", [value](const Vec&) { return value; }, 0.0);
}

RhoFunction RhoFunction::sin2_fiber_angle(int axis) {
    // phi = <w, e>^2 on unit lines; its fiber Hessian 2<u, e>^2 - 2<w, e>^2 is >= -2.
    return RhoFunction(
        "sin2_fiber_angle",
        [axis](const Vec& w) {
            if (axis < 0 || axis >= w.size()) throw UsageError("fiber axis out of range");
            return w[axis] * w[axis];
        },
        2.0);
}

double RhoFunction::value(const GrassmannPoint& p) const {
    if (p.m() != 1) throw UsageError("rho is defined on lines (m = 1)");
    const Vec w = p.frame_W.col(0);
    return phi_(w / w.norm());
}

Vec RhoFunction::chart_gradient(const BundleChart& chart, const Vec& z0, double step) const {
    const int D = chart.dim();
    const Stencil s = central_stencil(1, 4);
    Vec grad = Vec::Zero(D);
    for (int A = 0; A < D; ++A)
        for (std::size_t k = 0; k < s.offsets.size(); ++k) {
            if (s.weights[k] == 0.0) continue;
            Vec z = z0;
            z[A] += s.offsets[k] * step;
            grad[A] += (s.weights[k] / step) * value(chart.map(z));
        }
    return grad;
}

Mat RhoFunction::chart_hessian(const BundleChart& chart, const Vec& z0, const SasakiConfig& cfg, double step) const {
    const int D = chart.dim();
    const Stencil s1 = central_stencil(1, 4), s2 = central_stencil(2, 4);
    auto f = [&](int A, double a, int B, double b) {
        Vec z = z0;
        z[A] += a * step;
        z[B] += b * step;
        return value(chart.map(z));
    };
    Mat d2 = Mat::Zero(D, D);
    for (int A = 0; A < D; ++A) {
        for (std::size_t k = 0; k < s2.offsets.size(); ++k)
            d2(A, A) += (s2.weights[k] / (step * step)) * f(A, s2.offsets[k], A, 0.0);
        for (int B = A + 1; B < D; ++B) {
            double acc = 0.0;
            for (std::size_t k = 0; k < s1.offsets.size(); ++k)
                for (std::size_t q = 0; q < s1.offsets.size(); ++q) {
                    const double w = s1.weights[k] * s1.weights[q];
                    if (w != 0.0) acc += w * f(A, s1.offsets[k], B, s1.offsets[q]);
                }
            d2(A, B) = d2(B, A) = acc / (step * step);
        }
    }
    const Vec grad = chart_gradient(chart, z0, step);
    const Array3 G = connection_coefficients(chart, z0, cfg);
    Mat hess = d2;
    for (int A = 0; A < D; ++A)
        for (int B = 0; B < D; ++B)
            for (int C = 0; C < D; ++C) hess(A, B) -= G(C, A, B) * grad[C];
    return hess;
}

double RhoFunction::check_horizontally_constant(const MetricFamily& metric, int samples, std::uint64_t seed,
                                                double tolerance) const {
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int k = 0; k < samples; ++k) {
        const GrassmannPoint p = random_grassmann_point(metric, 1, rng);
        const BundleChart chart(metric, p);
        const Vec z0 = Vec::Zero(chart.dim());
        const Vec grad = chart_gradient(chart, z0);
        const std::vector<BundleVector> basis = chart.coordinate_basis(z0, {1e-4, 4});
        for (int a = 0; a < metric.dim(); ++a) {
            const BundleVector X = horizontal_lift(metric, Vec::Unit(metric.dim(), a), p);
            worst = std::max(worst, std::abs(grad.dot(components_in(basis, X))));
        }
    }
    if (worst > tolerance)
        throw PreconditionError("rho '" + name_ + "' is not horizontally constant (|d rho(X^h)| = " +
                                std::to_string(worst) + ")");
    return worst;
}

// ============================================================================
// Laplace-Beltrami on the lattice

double laplace_beltrami(const ImmersionMesh& mesh, const MetricFamily& metric, double t,
                        const std::vector<double>& values, int node) {
    const int l = mesh.ell();
    auto induced = [&](int q) {
        const ImmersionJet jet = mesh.jet(metric, q);
        return Mat(jet.d1.transpose() * eval_metric(metric, jet.point, t) * jet.d1);
    };
    auto apply = [&](int q, int axis, int deriv) {
        const auto& st = mesh.stencil(q, axis, deriv);
        double acc = 0.0;
        for (std::size_t k = 0; k < st.nodes.size(); ++k) acc += st.weights[k] * values[std::size_t(st.nodes[k])];
        return acc;
    };
    Vec df(l);
    Mat d2f(l, l);
    std::vector<Mat> dh(std::size_t(l), Mat::Zero(l, l));
    for (int a = 0; a < l; ++a) {
        df[a] = apply(node, a, 1);
        d2f(a, a) = apply(node, a, 2);
        const auto& st = mesh.stencil(node, a, 1);
        for (std::size_t k = 0; k < st.nodes.size(); ++k) dh[std::size_t(a)] += st.weights[k] * induced(st.nodes[k]);
    }
    if (l > 1) {
        const auto& st = mesh.stencil(node, 0, 1);
        double acc = 0.0;
        for (std::size_t k = 0; k < st.nodes.size(); ++k) acc += st.weights[k] * apply(st.nodes[k], 1, 1);
        d2f(0, 1) = d2f(1, 0) = acc;
    }
    const Mat hinv = induced(node).inverse();
    double out = 0.0;
    for (int i = 0; i < l; ++i)
        for (int j = 0; j < l; ++j) {
            double term = d2f(i, j);
            for (int k = 0; k < l; ++k) {
                double gamma = 0.0;
                for (int m = 0; m < l; ++m)
                    gamma += 0.5 * hinv(k, m) * (dh[std::size_t(i)](j, m) + dh[std::size_t(j)](i, m) - dh[std::size_t(m)](i, j));
                term -= gamma * df[k];
            }
            out += hinv(i, j) * term;
        }
    return out;
}

// ============================================================================
// Energy density by differentiating the Gauss map

namespace {

// |d gamma|^2 at a node of the analytic immersion at time t: the Gauss map is
// differentiated along the parameter lines (decompose of the framed curve
// u + s e_a) and contracted with the inverse induced metric in the Sasaki
// inner product.
double analytic_energy_density(const Problem& problem, double t, int node) {
    const Parametrization& param = *problem.param;
    const Vec u0 = problem.grid().param(node);
    const int l = problem.ell();
    const ImmersionJet j0 = param.jet(u0);
    const SecondFundamental sff0 = induced_frames(problem.metric, t, j0);
    const GrassmannPoint attach = gauss_point(sff0);
    std::vector<BundleVector> D;
    for (int a = 0; a < l; ++a) {
        const FramedCurve curve = [&](double s) {
            Vec u = u0;
            u[a] += s;
            const GrassmannPoint g = gauss_point(induced_frames(problem.metric, t, param.jet(u)));
            return FrameSample{g.base, g.frame_W};
        };
        D.push_back(decompose(problem.metric, curve, attach, DiffConfig{1e-3, 4}));
    }
    const Mat g = eval_metric(problem.metric, attach.base, t);
    const Mat h = j0.d1.transpose() * g * j0.d1;
    const Mat hinv = h.inverse();
    double e = 0.0;
    for (int a = 0; a < l; ++a)
        for (int b = 0; b < l; ++b) e += hinv(a, b) * sasaki_inner(problem.metric, D[a], D[b], problem.sasaki);
    return e;
}

}  // namespace

// ============================================================================
// Subsolution check

std::vector<CheckResult> check_subsolution(const Problem& problem, const RhoFunction& rho, int levels,
                                           double order_floor, int first_level) {
    if (problem.metric.kind() != MetricKind::flat_torus)
        throw UsageError("the subsolution check needs a flat torus ambient");
    if (problem.metric.dim() - problem.ell() != 1) throw UsageError("the subsolution check needs codimension 1");
    const double horizontal = rho.check_horizontally_constant(problem.metric, 10, 7);

    const int l = problem.ell();
    double excess = -std::numeric_limits<double>::infinity(), margin = std::numeric_limits<double>::infinity();
    double energy = 0.0, energy_sum = 0.0, rate = 0.0;
    long energy_count = 0;
    auto level = [&](int k) {
        const Problem p = problem.refined(k);
        if (p.steps < 2 || p.steps % 2 != 0) throw UsageError("the subsolution check needs an even step count");
        const VelocityField vel = p.velocity();
        const std::set<int> centres{p.steps / 2, p.steps};
        std::vector<FlowState> window{p.state()};
        std::vector<std::vector<double>> rho_values;
        auto rho_of = [&](const FlowState& s) {
            const int N = s.mesh.grid().node_count();
            std::vector<double> out(static_cast<std::size_t>(N));
            parallel_for(N, [&](int v) {
                out[std::size_t(v)] = rho.value(gauss_point(induced_frames(s.mesh, p.metric, s.t, v)));
            });
            return out;
        };
        rho_values.push_back(rho_of(window.back()));
        double worst = 0.0, sum = 0.0;
        long count = 0;
        for (int n = 1; n <= p.steps + 1; ++n) {
            window.push_back(step(p.metric, window.back(), p.dt, p.integrator, vel));
            rho_values.push_back(rho_of(window.back()));
            if (window.size() > 3) {
                window.erase(window.begin());
                rho_values.erase(rho_values.begin());
            }
            if (window.size() < 3) continue;
            const FlowState& sc = window[1];
            const bool centre = centres.count(n - 1) > 0;
            const std::vector<SecondFundamental> field = second_fundamental_field(sc.mesh, p.metric, sc.t);
            const int N = sc.mesh.grid().node_count();
            std::vector<std::array<double, 4>> res(static_cast<std::size_t>(N));
            parallel_for(N, [&](int v) {
                const std::size_t q = std::size_t(v);
                const double lhs = (rho_values[2][q] - rho_values[0][q]) / (2.0 * p.dt) -
                                   laplace_beltrami(sc.mesh, p.metric, sc.t, rho_values[1], v);
                const SecondFundamental& sff = field[q];
                const double bound = rho.C() * (l + sff.A_norm2());
                double dgamma2 = 0.0;
                for (int i = 0; i < l; ++i) dgamma2 += std::pow(sasaki_norm(p.metric, gauss_map_differential(sff, i), p.sasaki), 2);
                const double e = std::abs(dgamma2 - (l + p.sasaki.alpha * sff.A_norm2()));
                double eq = 0.0;
                if (centre) {
                    const BundleChart chart(p.metric, gauss_point(sff));
                    const Vec z0 = Vec::Zero(chart.dim());
                    const Mat hess = rho.chart_hessian(chart, z0, p.sasaki);
                    const std::vector<BundleVector> basis = chart.coordinate_basis(z0, {1e-4, 4});
                    double trace = 0.0;
                    for (int i = 0; i < l; ++i) {
                        const Vec c = components_in(basis, gauss_map_differential(sff, i));
                        trace += c.dot(hess * c);
                    }
                    eq = std::abs(lhs + trace);
                }
                res[q] = {lhs - bound, e, eq, centre ? 1.0 : 0.0};
            });
            for (const auto& r : res) {
                excess = std::max(excess, r[0]);
                margin = std::min(margin, -r[0]);
                energy = std::max(energy, r[1]);
                energy_sum += r[1];
                ++energy_count;
                if (r[3] > 0.0) {
                    worst = std::max(worst, r[2]);
                    sum += r[2];
                    ++count;
                }
            }
        }
        rate = std::max(rate, drift_rate(p.metric, window.back(), p.t0));
        char label[96];
        std::snprintf(label, sizeof label, "%d nodes, dt %.3g", p.counts[0], p.dt);
        return LevelResidual{label, p.spacing(), p.dt, worst, count ? sum / double(count) : 0.0};
    };
    CheckResult equality = convergence_study("subsolution_equality", level, levels, 0.0, order_floor, first_level);
    equality.extras["horizontal_gradient_max"] = horizontal;
    equality.extras["drift_rate"] = rate;
    equality.note = "(d/dt - Laplacian)(rho o gamma) + trace gamma^* Hess rho";

    CheckResult inequality;
    inequality.name = "subsolution_inequality";
    inequality.residual_max = excess;
    inequality.residual_mean = excess;
    inequality.extras["C"] = rho.C();
    inequality.extras["margin_min"] = margin;
    inequality.note = "largest (d/dt - Laplacian)(rho o gamma) - C((n-1) + |A|^2) over nodes and steps; pass when <= 0";
    finalize(inequality);
    inequality.pass = std::isfinite(excess) && excess <= 0.0;

    // Initial immersion: Gauss map differentiated along parameter lines
    // against (n-1) + |A|^2 from the second fundamental form.
    const int N0 = problem.grid().node_count();
    std::vector<double> analytic(static_cast<std::size_t>(N0));
    parallel_for(N0, [&](int v) {
        const SecondFundamental sff = second_fundamental_form(problem.metric, problem.t0,
                                                              problem.param->jet(problem.grid().param(v)));
        analytic[std::size_t(v)] = std::abs(analytic_energy_density(problem, problem.t0, v) -
                                            (l + problem.sasaki.alpha * sff.A_norm2()));
    });
    const double analytic_max = *std::max_element(analytic.begin(), analytic.end());

    CheckResult identity;
    identity.name = "energy_identity";
    identity.tolerance = 1e-8;
    identity.residual_max = std::max(energy, analytic_max);
    identity.residual_mean = energy_count ? energy_sum / double(energy_count) : 0.0;
    identity.extras["analytic_max"] = analytic_max;
    identity.extras["lattice_states_max"] = energy;
    identity.note = "| |d gamma|^2 - (n-1) - |A|^2 |: Sasaki norms of d gamma(e_i) on every flowed state, and "
                    "parameter-line derivatives of the Gauss map of the initial immersion";
    finalize(identity);
    return {inequality, equality, identity};
}

}  // namespace gaussflow
