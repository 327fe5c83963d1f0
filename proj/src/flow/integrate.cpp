// integrate.cpp - time stepping of immersion, metric scale and frames.

#include "gaussflow/flow.hpp"
#include "gaussflow/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

namespace gaussflow {

std::string to_string(Integrator integrator) {
    return integrator == Integrator::euler ? "euler" : "rk4";
}

Integrator integrator_from_string(const std::string& name) {
    if (name == "euler") return Integrator::euler;
    if (name == "rk4") return Integrator::rk4;
    throw ConfigError("unknown integrator '" + name + "' (expected euler or rk4)");
}

FlowState initial_state(const MetricFamily& metric, ImmersionMesh mesh, double t) {
    metric.check_time(t);
    FlowState s{t, std::move(mesh), {}, metric.scales(t)};
    const int N = s.mesh.grid().node_count();
    s.frames.resize(std::size_t(N));
    parallel_for(N, [&](int v) {
        const SecondFundamental f = induced_frames(s.mesh, metric, t, v);
        s.frames[std::size_t(v)] = NodeFrames{f.tangent, f.normal};
    });
    return s;
}

namespace {

struct Rates {
    std::vector<Vec> dF;
    std::vector<NodeFrames> dframes;
};

Rates evaluate(const MetricFamily& metric, const FlowState& s, const VelocityField& velocity) {
    const int N = s.mesh.grid().node_count();
    // The mean curvature path shares jets and connections with the kinematics.
    std::vector<ImmersionJet> jets(static_cast<std::size_t>(N));
    std::vector<ConnectionData> conns(static_cast<std::size_t>(N));
    std::vector<Vec> V;
    if (velocity) {
        V = velocity(s.mesh, s.t);
        parallel_for(N, [&](int v) {
            jets[std::size_t(v)] = s.mesh.jet(metric, v);
            conns[std::size_t(v)] = connection(metric, jets[std::size_t(v)].point, s.t);
        });
    } else {
        const Mat ref = normal_reference_for(s.mesh, metric, s.t);
        V.resize(std::size_t(N));
        parallel_for(N, [&](int v) {
            jets[std::size_t(v)] = s.mesh.jet(metric, v);
            conns[std::size_t(v)] = connection(metric, jets[std::size_t(v)].point, s.t);
            V[std::size_t(v)] = second_fundamental_form(conns[std::size_t(v)], s.t, jets[std::size_t(v)], ref).H;
        });
    }
    Rates r;
    r.dF = V;
    r.dframes.resize(std::size_t(N));
    parallel_for(N, [&](int v) {
        const NodeKinematics k = node_kinematics(metric, s.mesh, s.t, V, v, std::move(jets[std::size_t(v)]),
                                                 std::move(conns[std::size_t(v)]));
        const NodeFrames& f = s.frames[std::size_t(v)];
        NodeFrames d{Mat(f.tangent.rows(), f.tangent.cols()), Mat(f.normal.rows(), f.normal.cols())};
        for (int i = 0; i < int(f.tangent.cols()); ++i) d.tangent.col(i) = uhlenbeck_tangent_rhs(k, f, i);
        for (int j = 0; j < int(f.normal.cols()); ++j) d.normal.col(j) = uhlenbeck_normal_rhs(k, f, j);
        r.dframes[std::size_t(v)] = std::move(d);
    });
    return r;
}

// s + h * sum_q weights[q] * rates[q].
FlowState advance(const MetricFamily& metric, const FlowState& s, double h, const std::vector<const Rates*>& rates,
                  const std::vector<double>& weights) {
    FlowState out = s;
    out.t = s.t + h;
    const int N = s.mesh.grid().node_count();
    for (int v = 0; v < N; ++v) {
        ChartPoint x = s.mesh.value(v);
        NodeFrames& f = out.frames[std::size_t(v)];
        for (std::size_t q = 0; q < rates.size(); ++q) {
            const double w = h * weights[q];
            x.coords += w * rates[q]->dF[std::size_t(v)];
            f.tangent += w * rates[q]->dframes[std::size_t(v)].tangent;
            f.normal += w * rates[q]->dframes[std::size_t(v)].normal;
        }
        out.mesh.set_value(v, std::move(x));
    }
    out.metric_scale = metric.scales(out.t);
    return out;
}

double max_H_norm(const MetricFamily& metric, const FlowState& s) {
    double mx = 0.0;
    for (const SecondFundamental& f : second_fundamental_field(s.mesh, metric, s.t))
        mx = std::max(mx, std::sqrt(std::max(0.0, f.H.dot(eval_metric(metric, f.point, s.t) * f.H))));
    return mx;
}

[[noreturn]] void extinct(const MetricFamily& metric, const FlowState& last, const std::string& why) {
    double estimate = std::numeric_limits<double>::infinity();
    try {
        const double H = max_H_norm(metric, last);
        if (H > 0.0) estimate = last.t + last.mesh.ell() / (2.0 * H * H);
    } catch (const Error&) {
        estimate = last.t;
    }
    throw ExtinctionError("flow degenerated after t = " + std::to_string(last.t) + ": " + why, estimate,
                          std::make_shared<const FlowState>(last));
}

// A step that stretches or shrinks the induced metric by more than a factor
// of four in some direction does not resolve the flow; treat it like rank loss.
void check_advanced(const MetricFamily& metric, const FlowState& before, const FlowState& after) {
    const int N = after.mesh.grid().node_count();
    for (int v = 0; v < N; ++v) {
        const ChartPoint& x = after.mesh.value(v);
        if (!x.coords.allFinite()) extinct(metric, before, "non-finite node position");
        const ImmersionJet j0 = before.mesh.jet(metric, v);
        const ImmersionJet j1 = after.mesh.jet(metric, v);
        const Mat h0 = j0.d1.transpose() * eval_metric(metric, j0.point, before.t) * j0.d1;
        const Mat h1 = j1.d1.transpose() * eval_metric(metric, j1.point, after.t) * j1.d1;
        Eigen::LLT<Mat> llt(h0);
        const Mat Linv = llt.matrixL().solve(Mat::Identity(h0.rows(), h0.cols()));
        const Mat rel = Linv * h1 * Linv.transpose();
        Eigen::SelfAdjointEigenSolver<Mat> es(rel);
        const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
        if (!(lo > 0.25 && hi < 4.0)) extinct(metric, before, "induced metric collapsed at node " + std::to_string(v));
    }
}

}  // namespace

FlowState step(const MetricFamily& metric, const FlowState& state, double dt, Integrator integrator,
               const VelocityField& velocity) {
    if (!(dt > 0.0)) throw UsageError("step: dt must be positive");
    auto advanced = [&]() {
        const Rates k1 = evaluate(metric, state, velocity);
        if (integrator == Integrator::euler) return advance(metric, state, dt, {&k1}, {1.0});
        const Rates k2 = evaluate(metric, advance(metric, state, 0.5 * dt, {&k1}, {1.0}), velocity);
        const Rates k3 = evaluate(metric, advance(metric, state, 0.5 * dt, {&k2}, {1.0}), velocity);
        const Rates k4 = evaluate(metric, advance(metric, state, dt, {&k3}, {1.0}), velocity);
        return advance(metric, state, dt, {&k1, &k2, &k3, &k4}, {1.0 / 6, 1.0 / 3, 1.0 / 3, 1.0 / 6});
    };
    try {
        FlowState next = advanced();
        check_advanced(metric, state, next);
        return next;
    } catch (const DegeneracyError& e) {
        extinct(metric, state, e.what());
    } catch (const RankError& e) {
        extinct(metric, state, e.what());
    }
}

double stable_step(const MetricFamily& metric, const FlowState& state) {
    double hmin = std::numeric_limits<double>::infinity();
    const ParamGrid& grid = state.mesh.grid();
    for (int v = 0; v < grid.node_count(); ++v) {
        const ImmersionJet j = state.mesh.jet(metric, v);
        const Mat g = eval_metric(metric, j.point, state.t);
        for (int a = 0; a < grid.dim(); ++a) {
            const double speed = std::sqrt(j.d1.col(a).dot(g * j.d1.col(a)));
            hmin = std::min(hmin, speed * grid.spacing(a));
        }
    }
    return 0.7 * hmin * hmin;
}

FrameDrift frame_drift(const MetricFamily& metric, const FlowState& state) {
    const int N = state.mesh.grid().node_count();
    std::vector<FrameDrift> per(static_cast<std::size_t>(N));
    parallel_for(N, [&](int v) {
        const ImmersionJet j = state.mesh.jet(metric, v);
        const Mat g = eval_metric(metric, j.point, state.t);
        const NodeFrames& f = state.frames[std::size_t(v)];
        const Mat h = j.d1.transpose() * g * j.d1;
        FrameDrift d;
        d.orthonormality = std::max(gram_residual(f.tangent, h), gram_residual(f.normal, g));
        d.normality = cross_residual(f.normal, j.d1 * f.tangent, g);
        per[std::size_t(v)] = d;
    });
    FrameDrift out;
    for (const FrameDrift& d : per) {
        out.orthonormality = std::max(out.orthonormality, d.orthonormality);
        out.normality = std::max(out.normality, d.normality);
    }
    return out;
}

void reorthonormalize(const MetricFamily& metric, FlowState& state) {
    const int N = state.mesh.grid().node_count();
    parallel_for(N, [&](int v) {
        const ImmersionJet j = state.mesh.jet(metric, v);
        const Mat g = eval_metric(metric, j.point, state.t);
        const Mat h = j.d1.transpose() * g * j.d1;
        NodeFrames& f = state.frames[std::size_t(v)];
        const Mat projected = f.normal - j.d1 * h.ldlt().solve(j.d1.transpose() * g * f.normal);
        f.normal = gram_schmidt(projected, g, 1e-6);
        f.tangent = gram_schmidt(f.tangent, h, 1e-6);
    });
}

FlowRun integrate(const MetricFamily& metric, FlowState state, double t_end, const FlowOptions& options,
                  const VelocityField& velocity, const std::function<void(const FlowState&)>& observer) {
    if (!(options.dt > 0.0)) throw ConfigError("flow dt must be positive");
    if (options.record_every < 1) throw ConfigError("record_every must be at least 1");
    FlowRun run{state, {}, 0.0, 0.0, true};
    auto record = [&](int n, const FlowState& s, const FrameDrift& d) {
        FlowRecord r;
        r.step = n;
        r.t = s.t;
        r.metric_scale = s.metric_scale.empty() ? 1.0 : s.metric_scale.front();
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (const SecondFundamental& f : second_fundamental_field(s.mesh, metric, s.t)) {
            const double H = std::sqrt(std::max(0.0, f.H.dot(eval_metric(metric, f.point, s.t) * f.H)));
            lo = std::min(lo, H);
            hi = std::max(hi, H);
        }
        r.min_H = lo;
        r.max_H = hi;
        r.frame_drift = d.orthonormality;
        r.normality_drift = d.normality;
        run.series.push_back(r);
    };
    record(0, state, frame_drift(metric, state));

    const double tol = 1e-12 * std::max(1.0, std::abs(t_end));
    double t_fixed = state.t;
    int n = 0;
    while (state.t < t_end - tol) {
        const double h = std::min(options.dt, t_end - state.t);
        state = step(metric, state, h, options.integrator, velocity);
        ++n;
        if (observer) observer(state);
        const bool last = state.t >= t_end - tol;
        const bool fix = options.reorthonormalize_every > 0 && n % options.reorthonormalize_every == 0;
        if (n % options.record_every == 0 || fix || last) {
            const FrameDrift d = frame_drift(metric, state);
            run.max_drift = std::max(run.max_drift, d.max());
            if (state.t > t_fixed) run.max_drift_rate = std::max(run.max_drift_rate, d.max() / (state.t - t_fixed));
            record(n, state, d);
        }
        if (fix) {
            reorthonormalize(metric, state);
            t_fixed = state.t;
        }
    }
    run.drift_ok = run.max_drift <= options.drift_limit;
    run.final_state = std::move(state);
    return run;
}

void write_timeseries_csv(const std::vector<FlowRecord>& series, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write time series '" + path + "'");
    out << "step,t,metric_scale,min_H,max_H,frame_drift,normality_drift\n" << std::setprecision(17);
    for (const FlowRecord& r : series)
        out << r.step << ',' << r.t << ',' << r.metric_scale << ',' << r.min_H << ',' << r.max_H << ','
            << r.frame_drift << ',' << r.normality_drift << '\n';
    if (!out) throw IoError("failed writing time series '" + path + "'");
}

}  // namespace gaussflow
