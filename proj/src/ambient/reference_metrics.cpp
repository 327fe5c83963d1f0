// reference_metrics.cpp - catalog metrics written once over a generic scalar.

#include "reference_metrics.hpp"

#include "gaussflow/jet.hpp"

#include <cmath>
#include <limits>

namespace gaussflow {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxDim = 4;

double wrap(double x, double lo, double hi) {
    const double period = hi - lo;
    double y = std::fmod(x - lo, period);
    if (y < 0) y += period;
    return lo + y;
}

// Evaluates Derived::components<T> with the scalar type matching `order`.
template <class Derived>
class JetMetric : public ReferenceMetric {
public:
    MetricJet jet(const ChartPoint& x, int order) const override {
        const int n = this->dim();
        if (x.dim() != n || n > kMaxDim) throw UsageError("chart point has wrong dimension");
        if (!this->domain(x.chart_id).contains(x.coords)) throw DomainError("point outside chart domain");
        const auto& self = static_cast<const Derived&>(*this);
        MetricJet out;
        out.order = order;
        out.g.resize(n, n);
        if (order == 0) {
            double xs[kMaxDim], g[kMaxDim * kMaxDim];
            for (int i = 0; i < n; ++i) xs[i] = x.coords[i];
            self.template components<double>(xs, g, x.chart_id);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) out.g(i, j) = g[i * n + j];
            return out;
        }
        if (order == 1) {
            using J = Jet<kMaxDim, 1>;
            J xs[kMaxDim], g[kMaxDim * kMaxDim];
            for (int i = 0; i < n; ++i) xs[i] = J::variable(x.coords[i], i);
            self.template components<J>(xs, g, x.chart_id);
            out.dg = Array3(n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    out.g(i, j) = g[i * n + j].v;
                    for (int k = 0; k < n; ++k) out.dg(k, i, j) = g[i * n + j].d[k];
                }
            return out;
        }
        using J = Jet<kMaxDim, 2>;
        J xs[kMaxDim], g[kMaxDim * kMaxDim];
        for (int i = 0; i < n; ++i) xs[i] = J::variable(x.coords[i], i);
        self.template components<J>(xs, g, x.chart_id);
        out.dg = Array3(n);
        out.d2g.assign(n, Array3(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const J& gij = g[i * n + j];
                out.g(i, j) = gij.v;
                for (int k = 0; k < n; ++k) {
                    out.dg(k, i, j) = gij.d[k];
                    for (int l = 0; l < n; ++l) out.d2g[k](l, i, j) = gij.hess(k, l);
                }
            }
        return out;
    }
};

template <class T>
void fill_zero(T* g, int n) {
    for (int i = 0; i < n * n; ++i) g[i] = T(0.0);
}

// ============================================================================
// Flat metrics

class FlatMetric : public JetMetric<FlatMetric> {
public:
    FlatMetric(int n, bool periodic, double period) : n_(n), periodic_(periodic), period_(period) {}

    int dim() const override { return n_; }

    DomainBox domain(int) const override {
        DomainBox box;
        box.lo = Vec::Constant(n_, periodic_ ? 0.0 : -kInf);
        box.hi = Vec::Constant(n_, periodic_ ? period_ : kInf);
        box.periodic.assign(n_, periodic_);
        return box;
    }

    template <class T>
    void components(const T*, T* g, int) const {
        fill_zero(g, n_);
        for (int i = 0; i < n_; ++i) g[i * n_ + i] = T(1.0);
    }

private:
    int n_;
    bool periodic_;
    double period_;
};

// ============================================================================
// Round sphere in hyperspherical coordinates (theta_1..theta_{n-1}, phi)

class SphereMetric : public JetMetric<SphereMetric> {
public:
    SphereMetric(int n, double radius) : n_(n), r_(radius) {}

    int dim() const override { return n_; }
    int chart_count() const override { return n_ >= 2 ? 2 : 1; }

    DomainBox domain(int) const override {
        DomainBox box;
        box.lo = Vec::Zero(n_);
        box.hi = Vec::Constant(n_, kPi);
        box.hi[n_ - 1] = 2.0 * kPi;
        box.periodic.assign(n_, false);
        box.periodic[n_ - 1] = true;
        return box;
    }

    template <class T>
    void components(const T* x, T* g, int) const {
        using std::sin;
        fill_zero(g, n_);
        T factor(r_ * r_);
        for (int k = 0; k < n_; ++k) {
            g[k * n_ + k] = factor;
            if (k + 1 < n_) {
                const T s = sin(x[k]);
                factor = factor * s * s;
            }
        }
    }

    ChartPoint canonicalize(const ChartPoint& x) const override {
        ChartPoint y = wrapped(x);
        if (n_ < 2) return y;
        if (regularity(y.coords) >= kCapMargin) return y;
        ChartPoint other = transition(y, 1 - y.chart_id);
        return regularity(other.coords) > regularity(y.coords) ? other : y;
    }

    ChartPoint transition(const ChartPoint& x, int chart) const override {
        if (chart == x.chart_id) return x;
        if (chart < 0 || chart >= chart_count()) throw ChartError("sphere has two charts");
        const Vec X = embed(x);
        return wrapped(ChartPoint(polar(X, chart), chart));
    }

    // Point of the unit sphere in R^{n+1}.
    Vec embed(const ChartPoint& x) const {
        Vec Y(n_ + 1);
        double prod = 1.0;
        for (int k = 0; k + 1 < n_; ++k) {
            Y[k] = prod * std::cos(x.coords[k]);
            prod *= std::sin(x.coords[k]);
        }
        Y[n_ - 1] = prod * std::cos(x.coords[n_ - 1]);
        Y[n_] = prod * std::sin(x.coords[n_ - 1]);
        return unpermute(Y, x.chart_id);
    }

private:
    static constexpr double kCapMargin = 0.35;

    // Chart c reads the embedding axes cyclically shifted by 2c.
    Vec unpermute(const Vec& Y, int chart) const {
        const int N = n_ + 1;
        Vec X(N);
        for (int i = 0; i < N; ++i) X[(i + 2 * chart) % N] = Y[i];
        return X;
    }

    Vec polar(const Vec& X, int chart) const {
        const int N = n_ + 1;
        Vec Y(N);
        for (int i = 0; i < N; ++i) Y[i] = X[(i + 2 * chart) % N];
        Vec c(n_);
        for (int k = 0; k + 1 < n_; ++k) {
            double tail = 0.0;
            for (int j = k + 1; j < N; ++j) tail += Y[j] * Y[j];
            c[k] = std::atan2(std::sqrt(tail), Y[k]);
        }
        c[n_ - 1] = std::atan2(Y[n_], Y[n_ - 1]);
        return c;
    }

    double regularity(const Vec& c) const {
        double r = 1.0;
        for (int k = 0; k + 1 < n_; ++k) r = std::min(r, std::sin(c[k]));
        return r;
    }

    ChartPoint wrapped(const ChartPoint& x) const {
        ChartPoint y = x;
        y.coords[n_ - 1] = wrap(y.coords[n_ - 1], 0.0, 2.0 * kPi);
        return y;
    }

    int n_;
    double r_;
};

// ============================================================================
// Hyperbolic space, upper half-space model: g = s^2 / y^2 (dx^2 + dy^2)

class HyperbolicMetric : public JetMetric<HyperbolicMetric> {
public:
    HyperbolicMetric(int n, double scale) : n_(n), s_(scale) {}

    int dim() const override { return n_; }

    DomainBox domain(int) const override {
        DomainBox box;
        box.lo = Vec::Constant(n_, -kInf);
        box.hi = Vec::Constant(n_, kInf);
        box.lo[n_ - 1] = 0.0;
        box.periodic.assign(n_, false);
        return box;
    }

    template <class T>
    void components(const T* x, T* g, int) const {
        fill_zero(g, n_);
        const T c = T(s_ * s_) / (x[n_ - 1] * x[n_ - 1]);
        for (int i = 0; i < n_; ++i) g[i * n_ + i] = c;
    }

private:
    int n_;
    double s_;
};

// ============================================================================
// Product of two round 2-spheres, coordinates (theta1, phi1, theta2, phi2)

class ProductSpheresMetric : public JetMetric<ProductSpheresMetric> {
public:
    ProductSpheresMetric(double r1, double r2) : r1_(r1), r2_(r2) {}

    int dim() const override { return 4; }

    DomainBox domain(int) const override {
        DomainBox box;
        box.lo = Vec::Zero(4);
        box.hi = Vec(4);
        box.hi << kPi, 2.0 * kPi, kPi, 2.0 * kPi;
        box.periodic = {false, true, false, true};
        return box;
    }

    template <class T>
    void components(const T* x, T* g, int) const {
        using std::sin;
        fill_zero(g, 4);
        const T s1 = sin(x[0]), s2 = sin(x[2]);
        g[0] = T(r1_ * r1_);
        g[5] = T(r1_ * r1_) * s1 * s1;
        g[10] = T(r2_ * r2_);
        g[15] = T(r2_ * r2_) * s2 * s2;
    }

private:
    double r1_, r2_;
};

// ============================================================================
// Warped product dx0^2 + w(x0)^2 (dx1^2 + ... )

class WarpedMetric : public JetMetric<WarpedMetric> {
public:
    WarpedMetric(int n, const WarpProfile& p) : n_(n), p_(p) {}

    int dim() const override { return n_; }

    DomainBox domain(int) const override {
        DomainBox box;
        box.lo = Vec::Constant(n_, -kInf);
        box.hi = Vec::Constant(n_, kInf);
        box.periodic.assign(n_, false);
        return box;
    }

    template <class T>
    void components(const T* x, T* g, int) const {
        fill_zero(g, n_);
        const T w = T(p_.w0) + T(p_.w1) * x[0] + T(p_.w2) * x[0] * x[0];
        if (value_of(w) <= 0.0) throw DegeneracyError("warped product profile is not positive");
        g[0] = T(1.0);
        for (int i = 1; i < n_; ++i) g[i * n_ + i] = w * w;
    }

private:
    int n_;
    WarpProfile p_;
};

}  // namespace

// ============================================================================
// ReferenceMetric defaults

bool DomainBox::contains(const Vec& x) const {
    for (int i = 0; i < x.size(); ++i) {
        if (periodic[i]) continue;
        if (!(x[i] > lo[i] && x[i] < hi[i])) return false;
    }
    return true;
}

ChartPoint ReferenceMetric::canonicalize(const ChartPoint& x) const {
    const DomainBox box = domain(x.chart_id);
    ChartPoint y = x;
    for (int i = 0; i < y.dim(); ++i)
        if (box.periodic[i]) y.coords[i] = wrap(y.coords[i], box.lo[i], box.hi[i]);
    return y;
}

ChartPoint ReferenceMetric::transition(const ChartPoint& x, int chart) const {
    if (chart != x.chart_id) throw ChartError("metric has a single chart");
    return x;
}

std::shared_ptr<const ReferenceMetric> make_flat_metric(int n, bool periodic, double period) {
    return std::make_shared<FlatMetric>(n, periodic, period);
}
std::shared_ptr<const ReferenceMetric> make_sphere_metric(int n, double radius) {
    return std::make_shared<SphereMetric>(n, radius);
}
std::shared_ptr<const ReferenceMetric> make_hyperbolic_metric(int n, double scale) {
    return std::make_shared<HyperbolicMetric>(n, scale);
}
std::shared_ptr<const ReferenceMetric> make_product_spheres_metric(double r1, double r2) {
    return std::make_shared<ProductSpheresMetric>(r1, r2);
}
std::shared_ptr<const ReferenceMetric> make_warped_metric(int n, const WarpProfile& profile) {
    return std::make_shared<WarpedMetric>(n, profile);
}

Vec sphere_embedding(const ReferenceMetric& sphere, const ChartPoint& x) {
    const auto* s = dynamic_cast<const SphereMetric*>(&sphere);
    if (!s) throw UsageError("sphere_embedding needs a round sphere");
    return s->embed(x);
}

}  // namespace gaussflow
