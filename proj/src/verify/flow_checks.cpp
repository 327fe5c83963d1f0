// flow_checks.cpp - variational field, main identity, proof chain and radius laws.

#include "gaussflow/verify.hpp"

#include "gaussflow/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

namespace gaussflow {

VerticalHom gauss_velocity_fd(const MetricFamily& metric, const FlowState& s0, const FlowState& s1,
                              const FlowState& s2, int node, double dt) {
    const FlowState* states[3] = {&s0, &s1, &s2};
    const GrassmannPoint attach = frame_point(metric, s1, node);
    const FramedCurve curve = [&](double t) {
        const FlowState& st = *states[1 + int(std::lround(t / dt))];
        const GrassmannPoint g = gauss_point(induced_frames(st.mesh, metric, st.t, node));
        return FrameSample{g.base, g.frame_W};
    };
    return decompose(metric, curve, attach, DiffConfig{dt, 2}).vertical;
}

namespace {

// Rotations taking the mesh frames of a node to the state's Uhlenbeck frames.
std::pair<Mat, Mat> frame_rotations(const SecondFundamental& sff, const Mat& g, const FlowState& state, int node,
                                    const Mat& d1) {
    const NodeFrames& f = state.frames[std::size_t(node)];
    return {sff.normal.transpose() * g * f.normal, sff.pushed.transpose() * g * (d1 * f.tangent)};
}

std::string level_label(const Problem& p) {
    char buf[96];
    if (p.ell() > 1)
        std::snprintf(buf, sizeof buf, "%dx%d nodes, dt %.3g", p.counts[0], p.counts[1], p.dt);
    else
        std::snprintf(buf, sizeof buf, "%d nodes, dt %.3g", p.counts[0], p.dt);
    return buf;
}

struct Accumulator {
    double max = 0.0, sum = 0.0;
    long count = 0;
    void add(double v) {
        max = std::max(max, v);
        sum += v;
        ++count;
    }
    double mean() const { return count ? sum / double(count) : 0.0; }
};

}  // namespace

VerticalHom identity_rhs(const MetricFamily& metric, const FlowState& state, int node,
                         const std::vector<SecondFundamental>& field, const SasakiConfig& cfg) {
    const SecondFundamental& sff = field[std::size_t(node)];
    const CurvatureData cd = curvature(metric, sff.point, state.t);
    const VerticalHom gradH = normal_gradient_H(state.mesh, metric, state.t, node, &field);
    const BundleVector tau = tension_from_parts(sff, cd, gradH, cfg);
    const VerticalHom rhs(tau.vertical.coeffs + script_R(cd, gauss_point(sff)).coeffs);
    const auto [rw, rp] = frame_rotations(sff, cd.metric, state, node, state.mesh.jet(metric, node).d1);
    return reframe(rhs, rw, rp);
}

double drift_rate(const MetricFamily& metric, const FlowState& state, double t0) {
    if (!(state.t > t0)) return 0.0;
    return frame_drift(metric, state).max() / (state.t - t0);
}

// ============================================================================
// Variational field

CheckResult check_variational_field(const Problem& problem, const std::vector<double>& dts, double order_floor) {
    double rate = 0.0;
    auto level = [&](int k) {
        Problem p = problem;
        p.dt = dts[std::size_t(k)];
        const VelocityField vel = p.velocity();
        const FlowState s0 = p.state();
        const FlowState s1 = step(p.metric, s0, p.dt, p.integrator, vel);
        const FlowState s2 = step(p.metric, s1, p.dt, p.integrator, vel);
        const std::vector<Vec> V = vel(s1.mesh, s1.t);
        const int N = s1.mesh.grid().node_count();
        std::vector<double> res(static_cast<std::size_t>(N));
        parallel_for(N, [&](int v) {
            const VerticalHom closed = variational_vertical(p.metric, s1, v, V);
            const VerticalHom fd = gauss_velocity_fd(p.metric, s0, s1, s2, v, p.dt);
            res[std::size_t(v)] = (closed.coeffs - fd.coeffs).norm();
        });
        rate = std::max(rate, drift_rate(p.metric, s2, s0.t));
        Accumulator acc;
        for (double r : res) acc.add(r);
        return LevelResidual{level_label(p), p.spacing(), p.dt, acc.max, acc.mean()};
    };
    CheckResult r = convergence_study("variational_field", level, int(dts.size()), 0.0, order_floor);
    r.extras["drift_rate"] = rate;
    r.note = "closed-form vertical velocity vs central time differences of the Gauss map";
    return r;
}

// ============================================================================
// Main identity

CheckResult check_main_identity(const Problem& problem, int levels, double tolerance, double order_floor,
                                int first_level, int time_stride) {
    if (time_stride < 1) throw UsageError("time stride must be at least 1");
    if (!problem.metric.solves_normalized_flow())
        throw UsageError("the main identity needs an ambient that solves the normalized metric flow");
    double cross_fd = 0.0, cross_closed = 0.0, script = 0.0, rate = 0.0;
    auto level = [&](int k) {
        const Problem p = problem.refined(k);
        if (p.steps < 2 || p.steps % 2 != 0) throw UsageError("the main identity needs an even step count");
        if (p.steps / 2 < time_stride) throw UsageError("the time stride exceeds half the run");
        const VelocityField vel = p.velocity();
        // Centres of the evaluation windows: middle and end of the run. The
        // window holds states n - s .. n + s for the stride s.
        const int s = time_stride;
        const std::size_t width = std::size_t(2 * s + 1);
        const std::set<int> centres{p.steps / 2, p.steps};
        std::vector<FlowState> window{p.state()};
        Accumulator acc;
        for (int n = 1; n <= p.steps + s; ++n) {
            window.push_back(step(p.metric, window.back(), p.dt, p.integrator, vel));
            if (window.size() > width) window.erase(window.begin());
            if (!centres.count(n - s) || window.size() < width) continue;
            const FlowState& sc = window[std::size_t(s)];
            const std::vector<Vec> V = vel(sc.mesh, sc.t);
            const std::vector<SecondFundamental> field = second_fundamental_field(sc.mesh, p.metric, sc.t);
            const int N = sc.mesh.grid().node_count();
            std::vector<std::array<double, 4>> res(static_cast<std::size_t>(N));
            parallel_for(N, [&](int v) {
                const Mat fd = gauss_velocity_fd(p.metric, window.front(), sc, window.back(), v, s * p.dt).coeffs;
                const Mat rhs = identity_rhs(p.metric, sc, v, field, p.sasaki).coeffs;
                const Mat closed = variational_vertical(p.metric, sc, v, V).coeffs;
                const double sr = script_R(p.metric, gauss_point(field[std::size_t(v)]), sc.t).coeffs.norm();
                res[std::size_t(v)] = {(fd - rhs).norm(), (fd - closed).norm(), (closed - rhs).norm(), sr};
            });
            for (const auto& r : res) {
                acc.add(r[0]);
                if (k == first_level) {
                    cross_fd = std::max(cross_fd, r[1]);
                    cross_closed = std::max(cross_closed, r[2]);
                    script = std::max(script, r[3]);
                }
            }
        }
        rate = std::max(rate, drift_rate(p.metric, window.back(), p.t0));
        return LevelResidual{level_label(p), p.spacing(), p.dt, acc.max, acc.mean()};
    };
    CheckResult r = convergence_study("main_identity", level, levels, tolerance, order_floor, first_level);
    r.extras["cross_fd_vs_closed_max"] = cross_fd;
    r.extras["cross_closed_vs_rhs_max"] = cross_closed;
    r.extras["script_R_max"] = script;
    r.extras["drift_rate"] = rate;
    r.extras["time_stride"] = time_stride;
    r.note = "(d gamma/dt)^v by time differences of the Gauss map minus tau^v + script_R";
    return r;
}

std::vector<CheckResult> check_proof_chain(const Problem& problem, double tolerance) {
    if (!problem.metric.solves_normalized_flow())
        throw UsageError("the proof chain needs an ambient that solves the normalized metric flow");
    const VelocityField vel = problem.velocity();
    std::vector<FlowState> states{problem.state()};
    FlowState cur = states.front();
    for (int n = 0; n < problem.steps; ++n) cur = step(problem.metric, cur, problem.dt, problem.integrator, vel);
    states.push_back(cur);

    Accumulator c, d, e;
    double ric = 0.0, script = 0.0;
    for (const FlowState& s : states) {
        const std::vector<SecondFundamental> field = second_fundamental_field(s.mesh, problem.metric, s.t);
        const std::vector<Vec> V = vel(s.mesh, s.t);
        const int N = s.mesh.grid().node_count();
        std::vector<std::array<double, 5>> res(static_cast<std::size_t>(N));
        parallel_for(N, [&](int v) {
            const SecondFundamental& sff = field[std::size_t(v)];
            const CurvatureData cd = curvature(problem.metric, sff.point, s.t);
            const Mat gradH = normal_gradient_H(s.mesh, problem.metric, s.t, v, &field).coeffs;
            const Mat tau = tension_from_parts(sff, cd, VerticalHom(gradH), problem.sasaki).vertical.coeffs;
            const Mat ricci = ricci_normal_tangent(sff, cd).coeffs;
            const Mat R = script_R(cd, gauss_point(sff)).coeffs;
            const auto [rw, rp] = frame_rotations(sff, cd.metric, s, v, s.mesh.jet(problem.metric, v).d1);
            const Mat var = variational_vertical(problem.metric, s, v, V).coeffs;
            const Mat eqd_rhs = reframe(VerticalHom(Mat(-gradH + ricci)), rw, rp).coeffs;
            const Mat eqe_rhs = reframe(VerticalHom(Mat(tau + R)), rw, rp).coeffs;
            res[std::size_t(v)] = {(tau - (-gradH + ricci - R)).norm(), (var - eqd_rhs).norm(),
                                   (var - eqe_rhs).norm(), ricci.norm(), R.norm()};
        });
        for (const auto& r : res) {
            c.add(r[0]);
            d.add(r[1]);
            e.add(r[2]);
            ric = std::max(ric, r[3]);
            script = std::max(script, r[4]);
        }
    }
    auto make = [&](const char* name, const Accumulator& a, const char* note) {
        CheckResult r;
        r.name = name;
        r.tolerance = tolerance;
        r.residual_max = a.max;
        r.residual_mean = a.mean();
        r.extras["ricci_term_max"] = ric;
        r.extras["script_R_max"] = script;
        r.note = note;
        finalize(r);
        return r;
    };
    return {make("proof_chain_tension", c, "tau^v = -nabla^N H + Ric(nu, e) - script_R"),
            make("proof_chain_variation", d, "variational field with Q = -Ric + f g"),
            make("proof_chain_difference", e, "variational field - (tau^v + script_R)")};
}

// ============================================================================
// Radius laws

CheckResult check_radius_law(const Problem& problem, double r0, double fraction, double tolerance) {
    if (problem.metric.kind() != MetricKind::euclidean) throw UsageError("radius laws need a euclidean ambient");
    const int l = problem.ell();
    const double extinction = r0 * r0 / (2.0 * l);
    const double t_stop = problem.t0 + fraction * (extinction - problem.t0);
    FlowOptions options;
    options.dt = problem.dt;
    options.integrator = problem.integrator;
    options.reorthonormalize_every = 0;
    options.record_every = 1 << 30;
    Accumulator acc;
    auto observe = [&](const FlowState& s) {
        const double r = std::sqrt(r0 * r0 - 2.0 * l * s.t);
        for (const ChartPoint& x : s.mesh.values()) acc.add(std::abs(x.coords.norm() - r));
    };
    const FlowRun run = integrate(problem.metric, problem.state(), t_stop, options, problem.velocity(), observe);
    CheckResult r;
    r.name = "radius_law";
    r.tolerance = tolerance;
    r.residual_max = acc.max;
    r.residual_mean = acc.mean();
    r.extras["t_final"] = run.final_state.t;
    r.extras["extinction_time"] = extinction;
    r.extras["drift_rate"] = run.max_drift_rate;
    r.note = "max over nodes and steps of | |x| - sqrt(r0^2 - 2 l t) |";
    finalize(r);
    return r;
}

}  // namespace gaussflow
