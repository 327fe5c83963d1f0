// parametrizations.cpp - catalog of analytic curves and surfaces.

#include "gaussflow/immersion.hpp"
#include "gaussflow/jet.hpp"

#include <cmath>

namespace gaussflow {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kHalfPi = 0.5 * kPi;

using J = Jet<2, 2>;

// Parametrization from a generic map (u, x) written once over the scalar type.
template <class Map>
class MapParametrization : public Parametrization {
public:
    MapParametrization(std::string name, int n, ParamDomain domain, Map map)
        : name_(std::move(name)), n_(n), domain_(domain), map_(std::move(map)) {}

    std::string name() const override { return name_; }
    int ambient_dim() const override { return n_; }
    ParamDomain domain() const override { return domain_; }

    ImmersionJet jet(const Vec& u) const override {
        const int l = domain_.dim;
        if (u.size() != l) throw UsageError("parametrization: parameter has wrong dimension");
        J uj[2] = {J::variable(u[0], 0), l > 1 ? J::variable(u[1], 1) : J(0.0)};
        J x[4];
        map_(uj, x);
        ImmersionJet out;
        out.point = ChartPoint(Vec(n_));
        out.d1 = Mat(n_, l);
        out.d2.assign(std::size_t(l * l), Vec(n_));
        for (int a = 0; a < n_; ++a) {
            out.point.coords[a] = x[a].v;
            for (int i = 0; i < l; ++i) {
                out.d1(a, i) = x[a].d[i];
                for (int j = 0; j < l; ++j) out.d2[std::size_t(i * l + j)][a] = x[a].hess(i, j);
            }
        }
        return out;
    }

private:
    std::string name_;
    int n_;
    ParamDomain domain_;
    Map map_;
};

template <class Map>
ParametrizationPtr make(std::string name, int n, ParamDomain domain, Map map) {
    return std::make_shared<MapParametrization<Map>>(std::move(name), n, domain, std::move(map));
}

ParamDomain loop() {
    ParamDomain d;
    d.dim = 1;
    d.lo = {0.0, 0.0};
    d.hi = {2.0 * kPi, 0.0};
    d.periodic = {true, false};
    return d;
}

ParamDomain patch(double lo0, double hi0, bool p0, double lo1, double hi1, bool p1) {
    ParamDomain d;
    d.dim = 2;
    d.lo = {lo0, lo1};
    d.hi = {hi0, hi1};
    d.periodic = {p0, p1};
    return d;
}

void require(bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
}

}  // namespace

ParametrizationPtr circle(double r, double cx, double cy) {
    require(r > 0.0, "circle radius must be positive");
    return make("circle", 2, loop(), [=](const J* u, J* x) {
        x[0] = cx + r * cos(u[0]);
        x[1] = cy + r * sin(u[0]);
    });
}

ParametrizationPtr ellipse(double a, double b, double cx, double cy) {
    require(a > 0.0 && b > 0.0, "ellipse semi-axes must be positive");
    return make("ellipse", 2, loop(), [=](const J* u, J* x) {
        x[0] = cx + a * cos(u[0]);
        x[1] = cy + b * sin(u[0]);
    });
}

ParametrizationPtr perturbed_circle(double r, double eps, int mode, double cx, double cy) {
    require(r > 0.0 && std::abs(eps) < 1.0, "perturbed circle needs r > 0 and |eps| < 1");
    return make("perturbed_circle", 2, loop(), [=](const J* u, J* x) {
        const J rho = r * (1.0 + eps * cos(double(mode) * u[0]));
        x[0] = cx + rho * cos(u[0]);
        x[1] = cy + rho * sin(u[0]);
    });
}

ParametrizationPtr great_circle() {
    return make("great_circle", 2, loop(), [](const J* u, J* x) {
        x[0] = J(kHalfPi);
        x[1] = u[0];
    });
}

ParametrizationPtr perturbed_great_circle(double eps, int mode) {
    require(std::abs(eps) < 1.0, "perturbed great circle needs |eps| < 1");
    return make("perturbed_great_circle", 2, loop(), [=](const J* u, J* x) {
        x[0] = kHalfPi + eps * sin(double(mode) * u[0]);
        x[1] = u[0];
    });
}

ParametrizationPtr sphere(double r, double half_width) {
    require(r > 0.0 && half_width > 0.0 && half_width < kHalfPi, "sphere band needs r > 0 and 0 < width < pi/2");
    return make("sphere", 3, patch(kHalfPi - half_width, kHalfPi + half_width, false, 0.0, 2.0 * kPi, true),
                [=](const J* u, J* x) {
                    x[0] = r * sin(u[0]) * cos(u[1]);
                    x[1] = r * sin(u[0]) * sin(u[1]);
                    x[2] = r * cos(u[0]);
                });
}

ParametrizationPtr cylinder(double r, double half_height) {
    require(r > 0.0 && half_height > 0.0, "cylinder needs positive radius and height");
    return make("cylinder", 3, patch(0.0, 2.0 * kPi, true, -half_height, half_height, false), [=](const J* u, J* x) {
        x[0] = r * cos(u[0]);
        x[1] = r * sin(u[0]);
        x[2] = u[1];
    });
}

ParametrizationPtr graph(double c0, double cxx, double cxy, double cyy, double half) {
    require(half > 0.0, "graph patch needs positive size");
    return make("graph", 3, patch(-half, half, false, -half, half, false), [=](const J* u, J* x) {
        x[0] = u[0];
        x[1] = u[1];
        x[2] = c0 + 0.5 * (cxx * u[0] * u[0] + 2.0 * cxy * u[0] * u[1] + cyy * u[1] * u[1]);
    });
}

ParametrizationPtr affine(const Vec& p0, const Mat& directions) {
    const int n = int(p0.size()), l = int(directions.cols());
    require(n >= 2 && n <= 4 && directions.rows() == n && (l == 1 || l == 2) && l < n,
            "affine immersion needs 1 or 2 directions in dimension 2..4");
    const ParamDomain d = l == 1 ? patch(-1.0, 1.0, false, 0.0, 0.0, false) : patch(-1.0, 1.0, false, -1.0, 1.0, false);
    ParamDomain dom = d;
    dom.dim = l;
    return make(l == 1 ? "affine_line" : "affine_plane", n, dom, [=](const J* u, J* x) {
        for (int a = 0; a < n; ++a) {
            x[a] = J(p0[a]) + directions(a, 0) * u[0];
            if (l == 2) x[a] = x[a] + directions(a, 1) * u[1];
        }
    });
}

ParametrizationPtr catenoid(double c, double half_height) {
    require(c > 0.0 && half_height > 0.0, "catenoid needs positive waist and height");
    return make("catenoid", 3, patch(0.0, 2.0 * kPi, true, -half_height, half_height, false), [=](const J* u, J* x) {
        const J rho = c * cosh(u[1] / c);
        x[0] = rho * cos(u[0]);
        x[1] = rho * sin(u[0]);
        x[2] = u[1];
    });
}

ParametrizationPtr torus_product(double theta1, double theta2) {
    require(theta1 > 0.0 && theta1 < kPi && theta2 > 0.0 && theta2 < kPi, "torus colatitudes must lie in (0, pi)");
    return make("torus_product", 4, patch(0.0, 2.0 * kPi, true, 0.0, 2.0 * kPi, true), [=](const J* u, J* x) {
        x[0] = J(theta1);
        x[1] = u[0];
        x[2] = J(theta2);
        x[3] = u[1];
    });
}

ParametrizationPtr perturbed_torus(double eps, int mode) {
    require(std::abs(eps) < 0.5, "perturbed torus needs |eps| < 0.5");
    return make("perturbed_torus", 4, patch(0.0, 2.0 * kPi, true, 0.0, 2.0 * kPi, true), [=](const J* u, J* x) {
        x[0] = kHalfPi + eps * sin(double(mode) * u[0] + u[1]);
        x[1] = u[0];
        x[2] = kHalfPi + eps * sin(u[0] - double(mode) * u[1]);
        x[3] = u[1];
    });
}

}  // namespace gaussflow
