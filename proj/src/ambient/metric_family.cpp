// metric_family.cpp - catalog constructors and Einstein-homothety scales.

#include "reference_metrics.hpp"

#include <cmath>
#include <limits>

namespace gaussflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_dim(int n, int lo, int hi, const char* kind) {
    if (n < lo || n > hi)
        throw ConfigError(std::string(kind) + ": dimension must be in [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "]");
}

void require_positive(double v, const char* what) {
    if (!(v > 0.0)) throw ConfigError(std::string(what) + " must be positive");
}

}  // namespace

std::string to_string(MetricKind kind) {
    switch (kind) {
        case MetricKind::euclidean: return "euclidean";
        case MetricKind::flat_torus: return "flat_torus";
        case MetricKind::round_sphere: return "round_sphere";
        case MetricKind::hyperbolic: return "hyperbolic";
        case MetricKind::product_spheres: return "product_spheres";
        case MetricKind::warped_product: return "warped_product";
        case MetricKind::grid_sampled: return "grid_sampled";
    }
    return "unknown";
}

MetricKind metric_kind_from_string(const std::string& name) {
    for (MetricKind k : {MetricKind::euclidean, MetricKind::flat_torus, MetricKind::round_sphere,
                         MetricKind::hyperbolic, MetricKind::product_spheres, MetricKind::warped_product,
                         MetricKind::grid_sampled})
        if (to_string(k) == name) return k;
    throw ConfigError("unknown ambient kind '" + name + "'");
}

MetricFamily MetricFamily::euclidean(int n, double f) {
    require_dim(n, 1, 4, "euclidean");
    MetricFamily m;
    m.kind_ = MetricKind::euclidean;
    m.ref_ = make_flat_metric(n, false, 0.0);
    m.blocks_ = {ScaleBlock{0, n, 0.0, 1.0}};
    m.f_ = f;
    m.solves_flow_ = true;
    m.cache_domains();
    return m;
}

MetricFamily MetricFamily::flat_torus(int n, double period, double f) {
    require_dim(n, 1, 4, "flat_torus");
    require_positive(period, "flat_torus period");
    MetricFamily m;
    m.kind_ = MetricKind::flat_torus;
    m.ref_ = make_flat_metric(n, true, period);
    m.blocks_ = {ScaleBlock{0, n, 0.0, 1.0}};
    m.f_ = f;
    m.solves_flow_ = true;
    m.cache_domains();
    return m;
}

MetricFamily MetricFamily::round_sphere(int n, double radius, double f) {
    require_dim(n, 1, 4, "round_sphere");
    require_positive(radius, "round_sphere radius");
    MetricFamily m;
    m.kind_ = MetricKind::round_sphere;
    m.ref_ = make_sphere_metric(n, radius);
    // Ric(g0) = (n - 1) / r^2 g0 for g0 = r^2 * (unit round metric).
    m.blocks_ = {ScaleBlock{0, n, (n - 1) / (radius * radius), 1.0}};
    m.f_ = f;
    m.solves_flow_ = true;
    m.cache_domains();
    return m;
}

MetricFamily MetricFamily::hyperbolic(int n, double scale, double f) {
    require_dim(n, 2, 4, "hyperbolic");
    require_positive(scale, "hyperbolic scale");
    MetricFamily m;
    m.kind_ = MetricKind::hyperbolic;
    m.ref_ = make_hyperbolic_metric(n, scale);
    m.blocks_ = {ScaleBlock{0, n, -(n - 1) / (scale * scale), 1.0}};
    m.f_ = f;
    m.solves_flow_ = true;
    m.cache_domains();
    return m;
}

MetricFamily MetricFamily::product_spheres(double r1, double r2, double f) {
    require_positive(r1, "product_spheres r1");
    require_positive(r2, "product_spheres r2");
    MetricFamily m;
    m.kind_ = MetricKind::product_spheres;
    m.ref_ = make_product_spheres_metric(r1, r2);
    // Each factor is Einstein with its own constant; the blocks scale
    // independently and the product still solves the normalized flow.
    m.blocks_ = {ScaleBlock{0, 2, 1.0 / (r1 * r1), 1.0}, ScaleBlock{2, 4, 1.0 / (r2 * r2), 1.0}};
    m.f_ = f;
    m.solves_flow_ = true;
    m.cache_domains();
    return m;
}

MetricFamily MetricFamily::warped_product(int n, const WarpProfile& profile) {
    require_dim(n, 2, 4, "warped_product");
    MetricFamily m;
    m.kind_ = MetricKind::warped_product;
    m.ref_ = make_warped_metric(n, profile);
    m.blocks_ = {ScaleBlock{0, n, 0.0, 1.0}};
    m.f_ = 0.0;
    m.solves_flow_ = false;
    m.cache_domains();
    return m;
}

MetricFamily MetricFamily::grid_sampled(const GridTable& table) {
    MetricFamily m;
    m.kind_ = MetricKind::grid_sampled;
    m.ref_ = make_grid_metric(table);
    m.blocks_ = {ScaleBlock{0, table.dim, 0.0, 1.0}};
    m.f_ = 0.0;
    m.solves_flow_ = false;
    m.has_rate_ = false;
    double h = 0.0;
    for (int a = 0; a < table.dim; ++a) h = std::max(h, table.spacing(a));
    m.lattice_spacing_ = h;
    m.cache_domains();
    return m;
}

double MetricFamily::scale(int block, double t) const {
    const ScaleBlock& b = blocks_.at(block);
    if (f_ == 0.0) return b.c0 - b.lambda * t;
    const double eq = b.lambda / f_;
    return eq + (b.c0 - eq) * std::exp(f_ * t);
}

double MetricFamily::scale_rate(int block, double t) const {
    return -blocks_.at(block).lambda + f_ * scale(block, t);
}

std::vector<double> MetricFamily::scales(double t) const {
    std::vector<double> out;
    for (std::size_t b = 0; b < blocks_.size(); ++b) out.push_back(scale(int(b), t));
    return out;
}

int MetricFamily::block_of(int index) const {
    for (std::size_t b = 0; b < blocks_.size(); ++b)
        if (index >= blocks_[b].begin && index < blocks_[b].end) return int(b);
    throw UsageError("coordinate index outside metric blocks");
}

double MetricFamily::time_horizon() const {
    double horizon = kInf;
    for (const ScaleBlock& b : blocks_) {
        double hit = kInf;
        if (f_ == 0.0) {
            if (b.lambda > 0.0) hit = b.c0 / b.lambda;
        } else {
            // c(t) = 0  <=>  exp(f t) = lambda / (lambda - f c0)
            const double denom = b.lambda - f_ * b.c0;
            if (denom != 0.0) {
                const double ratio = b.lambda / denom;
                if (ratio > 0.0) {
                    const double t = std::log(ratio) / f_;
                    if (t > 0.0) hit = t;
                }
            }
        }
        horizon = std::min(horizon, hit);
    }
    return horizon;
}

void MetricFamily::check_time(double t) const {
    if (!(t >= 0.0) || !(t < time_horizon()))
        throw DomainError("time " + std::to_string(t) + " outside [0, " + std::to_string(time_horizon()) + ")");
}

void MetricFamily::check_point(const ChartPoint& x) const {
    if (x.dim() != dim()) throw UsageError("chart point has wrong dimension");
    if (x.chart_id < 0 || x.chart_id >= ref_->chart_count()) throw DomainError("unknown chart id");
    if (!ref_->domain(x.chart_id).contains(x.coords)) throw DomainError("point outside chart domain");
}

void MetricFamily::cache_domains() {
    boxes_.clear();
    for (int c = 0; c < ref_->chart_count(); ++c) boxes_.push_back(ref_->domain(c));
}

Vec MetricFamily::displacement(const ChartPoint& from, const ChartPoint& to) const {
    Vec d = to.chart_id == from.chart_id ? Vec(to.coords - from.coords)
                                         : Vec(ref_->transition(to, from.chart_id).coords - from.coords);
    if (from.chart_id < 0 || from.chart_id >= int(boxes_.size())) throw DomainError("unknown chart id");
    const DomainBox& box = boxes_[std::size_t(from.chart_id)];
    for (int i = 0; i < d.size(); ++i) {
        if (!box.periodic[i]) continue;
        const double period = box.hi[i] - box.lo[i];
        d[i] -= period * std::round(d[i] / period);
    }
    return d;
}

}  // namespace gaussflow
