// test_grassmann.cpp - bundle points, Sasaki metric, charts and connection tests

#include <gtest/gtest.h>

#include <cmath>

#include "gaussflow/grassmann.hpp"
#include "gaussflow/linalg.hpp"
#include "test_support.hpp"

namespace gaussflow::test {

namespace {

GrassmannPoint random_grassmann_point(const MetricFamily& metric, int m, std::mt19937_64& rng) {
    const ChartPoint x = random_point(metric, rng);
    Mat span(metric.dim(), m);
    for (int i = 0; i < m; ++i) span.col(i) = random_vector(metric.dim(), rng);
    return GrassmannPoint::from_span(metric, x, 0.0, span);
}

VerticalHom random_hom(int m, int l, std::mt19937_64& rng) {
    Mat b(m, l);
    for (int i = 0; i < m; ++i) b.row(i) = random_vector(l, rng).transpose();
    return VerticalHom(b);
}

// Largest |G(C,A,B) - G(C,B,A)|: coordinate fields commute.
double torsion_residual(const Array3& G, int D) {
    double worst = 0.0;
    for (int C = 0; C < D; ++C)
        for (int A = 0; A < D; ++A)
            for (int B = 0; B < D; ++B) worst = std::max(worst, std::abs(G(C, A, B) - G(C, B, A)));
    return worst;
}

// Largest |d_A g(d_B, d_C) - g(nabla_A d_B, d_C) - g(d_B, nabla_A d_C)|.
double compatibility_residual(const BundleChart& chart, const Vec& z0, const Array3& G, const SasakiConfig& cfg) {
    const int D = chart.dim();
    const double h = 1e-3;
    auto gram = [&](const Vec& z) {
        const auto basis = chart.coordinate_basis(z, {1e-4, 4});
        Mat out(D, D);
        for (int B = 0; B < D; ++B)
            for (int C = 0; C < D; ++C) out(B, C) = sasaki_inner(chart.metric(), basis[B], basis[C], cfg);
        return out;
    };
    const Mat g0 = gram(z0);
    const Stencil s = central_stencil(1, 4);
    double worst = 0.0;
    for (int A = 0; A < D; ++A) {
        Mat dg = Mat::Zero(D, D);
        for (std::size_t k = 0; k < s.offsets.size(); ++k) {
            if (s.weights[k] == 0.0) continue;
            Vec z = z0;
            z[A] += s.offsets[k] * h;
            dg += (s.weights[k] / h) * gram(z);
        }
        for (int B = 0; B < D; ++B)
            for (int C = 0; C < D; ++C) {
                double rhs = 0.0;
                for (int E = 0; E < D; ++E) rhs += G(E, A, B) * g0(E, C) + G(E, A, C) * g0(B, E);
                worst = std::max(worst, std::abs(dg(B, C) - rhs));
            }
    }
    return worst;
}

}  // namespace

// =============================================================================
// Fiber metric and Sasaki inner product
// =============================================================================

TEST(SasakiMetric, HorizontalAndVerticalAreOrthogonal) {
    const MetricFamily m = MetricFamily::round_sphere(3, 1.0);
    std::mt19937_64 rng(1);
    const GrassmannPoint p = random_grassmann_point(m, 1, rng);
    const BundleVector h{p, random_vector(3, rng), VerticalHom::zero(1, 2)};
    const BundleVector v{p, Vec::Zero(3), random_hom(1, 2, rng)};
    EXPECT_EQ(sasaki_inner(m, h, v, {}), 0.0);
}

TEST(SasakiMetric, VerticalBasisIsOrthonormal) {
    const MetricFamily m = MetricFamily::euclidean(4);
    std::mt19937_64 rng(2);
    const GrassmannPoint p = random_grassmann_point(m, 2, rng);
    for (int i = 0; i < 2; ++i)
        for (int a = 0; a < 2; ++a)
            for (int j = 0; j < 2; ++j)
                for (int b = 0; b < 2; ++b) {
                    Mat e1 = Mat::Zero(2, 2), e2 = Mat::Zero(2, 2);
                    e1(i, a) = 1.0;
                    e2(j, b) = 1.0;
                    const BundleVector x{p, Vec::Zero(4), VerticalHom(e1)};
                    const BundleVector y{p, Vec::Zero(4), VerticalHom(e2)};
                    EXPECT_DOUBLE_EQ(sasaki_inner(m, x, y, {}), (i == j && a == b) ? 1.0 : 0.0);
                }
}

TEST(SasakiMetric, ScalingConstantWeightsVerticalPart) {
    const MetricFamily m = MetricFamily::euclidean(2);
    const GrassmannPoint p = GrassmannPoint::from_span(m, ChartPoint(Vec::Zero(2)), 0.0, Vec::Unit(2, 0));
    const BundleVector v{p, Vec::Zero(2), VerticalHom(Mat::Constant(1, 1, 1.0))};
    EXPECT_DOUBLE_EQ(sasaki_inner(m, v, v, {2.0}), 2.0);
    EXPECT_THROW(sasaki_inner(m, v, v, {0.0}), ConfigError);
    EXPECT_THROW(sasaki_inner(m, v, v, {-1.0}), ConfigError);
}

TEST(SasakiMetric, MismatchedAttachmentThrows) {
    const MetricFamily m = MetricFamily::euclidean(2);
    const GrassmannPoint p = GrassmannPoint::from_span(m, ChartPoint(Vec::Zero(2)), 0.0, Vec::Unit(2, 0));
    const GrassmannPoint q = GrassmannPoint::from_span(m, ChartPoint(Vec::Zero(2)), 0.0, Vec::Unit(2, 1));
    const BundleVector x{p, Vec::Unit(2, 0), VerticalHom::zero(1, 1)};
    const BundleVector y{q, Vec::Unit(2, 0), VerticalHom::zero(1, 1)};
    EXPECT_THROW(sasaki_inner(m, x, y, {}), UsageError);
}

TEST(SasakiMetric, FrameGaugeInvariance) {
    std::mt19937_64 rng(3);
    const MetricFamily m = MetricFamily::product_spheres(1.0, 1.0);
    for (int sample = 0; sample < 20; ++sample) {
        const GrassmannPoint p = random_grassmann_point(m, 2, rng);
        const Mat R = random_orthogonal(2, rng), S = random_orthogonal(2, rng);
        const GrassmannPoint q = reframe(p, R, S);
        const BundleVector x{p, random_vector(4, rng), random_hom(2, 2, rng)};
        const BundleVector y{p, random_vector(4, rng), random_hom(2, 2, rng)};
        EXPECT_NEAR(sasaki_inner(m, x, y, {1.7}), sasaki_inner(m, reframe(x, R, S), reframe(y, R, S), {1.7}), 1e-9);

        const CurvatureData cd = curvature(m, p.base, 0.0);
        EXPECT_NEAR(script_R(cd, p).coeffs.norm(), script_R(cd, q).coeffs.norm(), 1e-9);
        const Vec u1 = random_vector(4, rng), u2 = random_vector(4, rng);
        const VerticalHom rp = r_perp(cd, u1, u2, p), rq = r_perp(cd, u1, u2, q);
        EXPECT_NEAR(rp.coeffs.norm(), rq.coeffs.norm(), 1e-9);
        EXPECT_LE((reframe(rp, R, S).coeffs - rq.coeffs).cwiseAbs().maxCoeff(), 1e-9);
    }
}

// =============================================================================
// Curvature operators
// =============================================================================

TEST(CurvatureOperators, RPerpVanishesWhenFlatOrRepeated) {
    std::mt19937_64 rng(4);
    const MetricFamily flat = MetricFamily::euclidean(3);
    const GrassmannPoint p = random_grassmann_point(flat, 1, rng);
    EXPECT_EQ(r_perp(flat, random_vector(3, rng), random_vector(3, rng), p).coeffs.norm(), 0.0);

    const MetricFamily sphere = MetricFamily::round_sphere(3, 1.0);
    const GrassmannPoint q = random_grassmann_point(sphere, 2, rng);
    const Vec u = random_vector(3, rng);
    EXPECT_EQ(r_perp(sphere, u, u, q).coeffs.norm(), 0.0);
}

TEST(CurvatureOperators, RPerpOnUnitSphereMatchesConstantCurvature) {
    std::mt19937_64 rng(5);
    const MetricFamily m = MetricFamily::round_sphere(3, 1.0);
    for (int sample = 0; sample < 20; ++sample) {
        const GrassmannPoint p = random_grassmann_point(m, 1, rng);
        const Mat g = eval_metric(m, p.base, 0.0);
        const Vec x1 = random_vector(3, rng), x2 = random_vector(3, rng);
        const VerticalHom b = r_perp(m, x1, x2, p);
        for (int a = 0; a < 2; ++a) {
            const Vec v = p.frame_W.col(0), w = p.frame_Wperp.col(a);
            const double expected = x2.dot(g * v) * x1.dot(g * w) - x1.dot(g * v) * x2.dot(g * w);
            EXPECT_NEAR(b.coeffs(0, a), expected, 1e-8);
        }
    }
}

TEST(CurvatureOperators, ScriptRVanishesForLinesAndFlatAmbients) {
    std::mt19937_64 rng(6);
    for (const MetricFamily& m : {MetricFamily::round_sphere(3, 1.0), MetricFamily::hyperbolic(3, 1.0),
                                  MetricFamily::product_spheres(0.8, 1.1)}) {
        const GrassmannPoint p = random_grassmann_point(m, 1, rng);
        EXPECT_EQ(script_R(m, p, 0.0).coeffs.norm(), 0.0);
    }
    for (const MetricFamily& m : {MetricFamily::euclidean(4), MetricFamily::flat_torus(3)}) {
        const GrassmannPoint p = random_grassmann_point(m, 2, rng);
        EXPECT_EQ(script_R(m, p, 0.0).coeffs.norm(), 0.0);
    }
}

TEST(CurvatureOperators, ScriptRVanishesOnConstantCurvature) {
    std::mt19937_64 rng(7);
    const MetricFamily m = MetricFamily::round_sphere(3, 1.0);
    for (int sample = 0; sample < 20; ++sample) {
        const GrassmannPoint p = random_grassmann_point(m, 2, rng);
        EXPECT_LE(script_R(m, p, 0.0).coeffs.cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(CurvatureOperators, ScriptRMatchesComponentSummationOnProduct) {
    std::mt19937_64 rng(8);
    const MetricFamily m = MetricFamily::product_spheres(1.0, 1.0);
    double largest = 0.0;
    for (int sample = 0; sample < 10; ++sample) {
        const GrassmannPoint p = random_grassmann_point(m, 2, rng);
        const CurvatureData cd = curvature(m, p.base, 0.0);
        const Array4 L = cd.lowered();
        const VerticalHom b = script_R(cd, p);
        for (int j = 0; j < 2; ++j)
            for (int al = 0; al < 2; ++al) {
                // g(R(v_j, v_i) v_i, w) = L_{abcd} w^a v_i^b v_j^c v_i^d
                double expected = 0.0;
                for (int i = 0; i < 2; ++i)
                    for (int a = 0; a < 4; ++a)
                        for (int bb = 0; bb < 4; ++bb)
                            for (int c = 0; c < 4; ++c)
                                for (int d = 0; d < 4; ++d)
                                    expected += L(a, bb, c, d) * p.frame_Wperp(a, al) * p.frame_W(bb, i) *
                                                p.frame_W(c, j) * p.frame_W(d, i);
                EXPECT_NEAR(b.coeffs(j, al), expected, 1e-10);
                largest = std::max(largest, std::abs(expected));
            }
    }
    EXPECT_GT(largest, 0.1);
}

// =============================================================================
// Bundle charts
// =============================================================================

TEST(BundleChart, CenterMapsToItself) {
    std::mt19937_64 rng(9);
    const MetricFamily m = MetricFamily::round_sphere(3, 1.0);
    const GrassmannPoint c = random_grassmann_point(m, 1, rng);
    const BundleChart chart(m, c);
    const GrassmannPoint p = chart_map(chart, Vec::Zero(3), Mat::Zero(1, 2));
    EXPECT_TRUE(same_attachment(p, c, 1e-12));
}

TEST(BundleChart, EuclideanFiberCoordinateTiltsTheLine) {
    const MetricFamily m = MetricFamily::euclidean(2);
    const GrassmannPoint c = GrassmannPoint::from_span(m, ChartPoint(Vec::Zero(2)), 0.0, Vec::Unit(2, 0));
    const BundleChart chart(m, c);
    const double sign = c.frame_Wperp(1, 0);
    for (double s : {-2.0, 0.3, 1.5}) {
        const GrassmannPoint p = chart_map(chart, Vec::Zero(2), Mat::Constant(1, 1, s * sign));
        const double angle = std::atan2(p.frame_W(1, 0), p.frame_W(0, 0));
        EXPECT_NEAR(angle, std::atan(s), 1e-14);
    }
}

TEST(BundleChart, ProjectionIgnoresFiberCoordinates) {
    std::mt19937_64 rng(10);
    const MetricFamily m = MetricFamily::round_sphere(3, 1.0);
    const GrassmannPoint c = random_grassmann_point(m, 1, rng);
    const BundleChart chart(m, c, 64);
    const Vec x = 0.3 * random_vector(3, rng);
    const GrassmannPoint p = chart_map(chart, x, Mat::Zero(1, 2));
    const GrassmannPoint q = chart_map(chart, x, random_hom(1, 2, rng).coeffs);
    EXPECT_LE((p.base.coords - q.base.coords).cwiseAbs().maxCoeff(), 1e-15);
    Mat E(3, 3);
    E << c.frame_W, c.frame_Wperp;
    const TransportResult r = geodesic_transport(m, 0.0, c.base, E * x, Mat::Zero(3, 0), 64);
    EXPECT_LE((p.base.coords - r.end.coords).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LE(q.frame_residual(m), 1e-10);
}

TEST(BundleChart, InverseRoundTrip) {
    std::mt19937_64 rng(11);
    const MetricFamily m = MetricFamily::product_spheres(1.0, 1.2);
    const GrassmannPoint c = random_grassmann_point(m, 2, rng);
    const BundleChart chart(m, c);
    Vec z(chart.dim());
    z = 0.2 * random_vector(chart.dim(), rng);
    const GrassmannPoint p = chart.map(z);
    EXPECT_LE((chart.inverse(p) - z).cwiseAbs().maxCoeff(), 1e-9);
    const GrassmannPoint rotated = reframe(p, random_orthogonal(2, rng), random_orthogonal(2, rng));
    EXPECT_LE((chart.inverse(rotated) - z).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(BundleChart, InverseRejectsSubspaceOutsideChart) {
    const MetricFamily m = MetricFamily::euclidean(2);
    const GrassmannPoint c = GrassmannPoint::from_span(m, ChartPoint(Vec::Zero(2)), 0.0, Vec::Unit(2, 0));
    const BundleChart chart(m, c);
    const GrassmannPoint p = GrassmannPoint::from_span(m, ChartPoint(Vec::Zero(2)), 0.0, Vec::Unit(2, 1));
    EXPECT_THROW(chart.inverse(p), ChartError);
}

// =============================================================================
// Decomposition of velocities
// =============================================================================

TEST(Decompose, RotatingLineHasUnitVerticalVelocity) {
    const MetricFamily m = MetricFamily::euclidean(2);
    const ChartPoint x(Vec::Zero(2));
    const GrassmannPoint p = GrassmannPoint::from_span(m, x, 0.0, Vec::Unit(2, 0));
    const FramedCurve curve = [&](double s) {
        Mat f(2, 1);
        f << std::cos(s), std::sin(s);
        return FrameSample{x, f};
    };
    const BundleVector v = decompose(m, curve, p);
    EXPECT_EQ(v.horizontal.norm(), 0.0);
    EXPECT_NEAR(v.vertical.coeffs.norm(), 1.0, 1e-10);
}

TEST(Decompose, NonOrthonormalFrameGivesSameVelocity) {
    std::mt19937_64 rng(12);
    const MetricFamily m = MetricFamily::round_sphere(3, 1.0);
    const GrassmannPoint c = random_grassmann_point(m, 2, rng);
    const BundleChart chart(m, c);
    const Vec z0 = 0.1 * random_vector(chart.dim(), rng), dz = random_vector(chart.dim(), rng);
    const GrassmannPoint p = chart.map(z0);
    const Mat mix0 = Mat::Identity(2, 2) + 0.3 * random_hom(2, 2, rng).coeffs;
    const Mat mix1 = random_hom(2, 2, rng).coeffs;
    const FramedCurve plain = [&](double s) {
        const GrassmannPoint q = s == 0.0 ? p : chart.map(z0 + s * dz);
        return FrameSample{q.base, q.frame_W};
    };
    const FramedCurve mixed = [&](double s) {
        const GrassmannPoint q = s == 0.0 ? p : chart.map(z0 + s * dz);
        return FrameSample{q.base, Mat(q.frame_W * (mix0 + s * mix1))};
    };
    const BundleVector a = decompose(m, plain, p), b = decompose(m, mixed, p);
    EXPECT_LE((a.horizontal - b.horizontal).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LE((a.vertical.coeffs - b.vertical.coeffs).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Decompose, DegenerateFrameThrows) {
    const MetricFamily m = MetricFamily::euclidean(3);
    const ChartPoint x(Vec::Zero(3));
    Mat span(3, 2);
    span << 1, 0, 0, 1, 0, 0;
    const GrassmannPoint p = GrassmannPoint::from_span(m, x, 0.0, span);
    const FramedCurve curve = [&](double) { return FrameSample{x, Mat(Mat::Zero(3, 2))}; };
    EXPECT_THROW(decompose(m, curve, p), RankError);
}

TEST(Decompose, CoordinateVelocitiesAtChartCenter) {
    std::mt19937_64 rng(13);
    const MetricFamily m = MetricFamily::round_sphere(3, 1.0);
    const GrassmannPoint c = random_grassmann_point(m, 1, rng);
    const BundleChart chart(m, c);
    const auto basis = chart.coordinate_basis(Vec::Zero(chart.dim()));
    Mat E(3, 3);
    E << c.frame_W, c.frame_Wperp;
    for (int k = 0; k < 3; ++k) {
        EXPECT_LE((basis[k].horizontal - E.col(k)).cwiseAbs().maxCoeff(), 1e-9);
        EXPECT_LE(basis[k].vertical.coeffs.cwiseAbs().maxCoeff(), 1e-9);
    }
    for (int a = 0; a < 2; ++a) {
        Mat expected = Mat::Zero(1, 2);
        expected(0, a) = 1.0;
        EXPECT_LE(basis[3 + a].horizontal.cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LE((basis[3 + a].vertical.coeffs - expected).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(Decompose, ChartCurveThroughCenter) {
    std::mt19937_64 rng(14);
    const MetricFamily m = MetricFamily::product_spheres(1.0, 1.0);
    const GrassmannPoint c = random_grassmann_point(m, 2, rng);
    const BundleChart chart(m, c);
    const Vec dz = random_vector(chart.dim(), rng);
    const FramedCurve curve = [&](double s) {
        const GrassmannPoint q = chart.map(s * dz);
        return FrameSample{q.base, q.frame_W};
    };
    const BundleVector v = decompose(m, curve, c);
    Mat E(4, 4);
    E << c.frame_W, c.frame_Wperp;
    EXPECT_LE((v.horizontal - E * dz.head(4)).cwiseAbs().maxCoeff(), 1e-9);
    Mat a(2, 2);
    a << dz[4], dz[5], dz[6], dz[7];
    EXPECT_LE((v.vertical.coeffs - a).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(HorizontalLift, ZeroAndFlatCases) {
    std::mt19937_64 rng(15);
    const MetricFamily sphere = MetricFamily::round_sphere(2, 1.0);
    const GrassmannPoint p = random_grassmann_point(sphere, 1, rng);
    const BundleVector zero = horizontal_lift(sphere, Vec::Zero(2), p);
    EXPECT_EQ(zero.horizontal.norm() + zero.vertical.coeffs.norm(), 0.0);

    const MetricFamily flat = MetricFamily::euclidean(3);
    const GrassmannPoint q = random_grassmann_point(flat, 2, rng);
    const Vec u = random_vector(3, rng);
    const BundleVector lift = horizontal_lift(flat, u, q);
    EXPECT_LE((lift.horizontal - u).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE(lift.vertical.coeffs.cwiseAbs().maxCoeff(), 1e-10);
}

TEST(HorizontalLift, PreservesLengthOnSphere) {
    std::mt19937_64 rng(16);
    const MetricFamily m = MetricFamily::round_sphere(3, 1.0);
    for (int sample = 0; sample < 100; ++sample) {
        const GrassmannPoint p = random_grassmann_point(m, 1 + sample % 2, rng);
        const Vec u = random_vector(3, rng);
        const BundleVector lift = horizontal_lift(m, u, p);
        const double gu = u.dot(eval_metric(m, p.base, 0.0) * u);
        EXPECT_NEAR(sasaki_inner(m, lift, lift, {}), gu, 1e-9);
    }
}

// =============================================================================
// Vertical covariant derivative
// =============================================================================

TEST(NablaPerp, SingleFiberOfPlaneLinesIsTheCircle) {
    // Lines through the origin of R^2 at angle theta(s); a vertical field of
    // length f(s) along the fiber differentiates as f'(s).
    const MetricFamily m = MetricFamily::euclidean(2);
    const ChartPoint x(Vec::Zero(2));
    auto point = [&](double s) {
        const double th = 0.4 + 0.7 * s;
        GrassmannPoint p;
        p.base = x;
        p.frame_W = Mat(2, 1);
        p.frame_W << std::cos(th), std::sin(th);
        p.frame_Wperp = Mat(2, 1);
        p.frame_Wperp << -std::sin(th), std::cos(th);
        return p;
    };
    const VerticalCurve field = [&](double s) {
        return VerticalSample{point(s), VerticalHom(Mat::Constant(1, 1, 1.0 + 2.0 * s + s * s))};
    };
    EXPECT_NEAR(nabla_perp(m, field).coeffs(0, 0), 2.0, 1e-10);
}

TEST(NablaPerp, CompatibleWithFiberMetric) {
    std::mt19937_64 rng(17);
    const MetricFamily m = MetricFamily::round_sphere(3, 1.0);
    for (int sample = 0; sample < 10; ++sample) {
        const ChartPoint x0 = random_point(m, rng);
        const Vec u = random_vector(3, rng);
        Mat y0(3, 2), y1(3, 2);
        for (int i = 0; i < 2; ++i) {
            y0.col(i) = random_vector(3, rng);
            y1.col(i) = random_vector(3, rng);
        }
        const VerticalHom b0 = random_hom(2, 1, rng), b1 = random_hom(2, 1, rng);
        const VerticalCurve field = [&](double s) {
            ChartPoint x = x0;
            x.coords += s * u;
            const GrassmannPoint p = GrassmannPoint::from_span(m, x, 0.0, y0 + s * y1 + s * s * y0);
            return VerticalSample{p, VerticalHom(b0.coeffs + s * b1.coeffs)};
        };
        const VerticalHom nb = nabla_perp(m, field);
        // d/ds k(B, B) = 2 B0 . B1 since frames are orthonormal at every s.
        EXPECT_NEAR(2.0 * fiber_inner(b0, b1), 2.0 * fiber_inner(nb, b0), 1e-7);
    }
}

TEST(NablaPerp, TransformsUnderSmoothReframing) {
    std::mt19937_64 rng(18);
    const MetricFamily m = MetricFamily::product_spheres(1.0, 1.0);
    const ChartPoint x0 = random_point(m, rng);
    const Vec u = random_vector(4, rng);
    Mat y0(4, 2), y1(4, 2);
    for (int i = 0; i < 2; ++i) {
        y0.col(i) = random_vector(4, rng);
        y1.col(i) = random_vector(4, rng);
    }
    const VerticalHom b0 = random_hom(2, 2, rng), b1 = random_hom(2, 2, rng);
    auto rotation = [](double angle) {
        Mat r(2, 2);
        r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
        return r;
    };
    auto sample = [&](double s) {
        ChartPoint x = x0;
        x.coords += s * u;
        return VerticalSample{GrassmannPoint::from_span(m, x, 0.0, y0 + s * y1),
                              VerticalHom(b0.coeffs + s * b1.coeffs)};
    };
    const VerticalCurve plain = sample;
    const VerticalCurve turned = [&](double s) {
        const VerticalSample f = sample(s);
        const Mat R = rotation(0.3 + 1.1 * s), S = rotation(-0.2 + 0.5 * s);
        return VerticalSample{reframe(f.point, R, S), reframe(f.value, R, S)};
    };
    const VerticalHom a = nabla_perp(m, plain), b = nabla_perp(m, turned);
    EXPECT_LE((reframe(a, rotation(0.3), rotation(-0.2)).coeffs - b.coeffs).cwiseAbs().maxCoeff(), 1e-8);
}

// =============================================================================
// Levi-Civita connection
// =============================================================================

TEST(GrassmannConnection, FlatAmbientReducesToComponentDerivatives) {
    std::mt19937_64 rng(19);
    const MetricFamily m = MetricFamily::euclidean(3);
    const GrassmannPoint p = random_grassmann_point(m, 1, rng);
    const Vec u = random_vector(3, rng), h0 = random_vector(3, rng), h1 = random_vector(3, rng);
    const VerticalHom b0 = random_hom(1, 2, rng), b1 = random_hom(1, 2, rng);
    const BundleVector x{p, u, random_hom(1, 2, rng)};
    const FieldAlongCurve y = [&](double s) {
        GrassmannPoint q = p;
        q.base.coords += s * u;
        return BundleVector{q, h0 + s * h1, VerticalHom(b0.coeffs + s * b1.coeffs)};
    };
    const BundleVector d = grassmann_connection(m, x, y, {2.7});
    EXPECT_LE((d.horizontal - h1).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE((d.vertical.coeffs - b1.coeffs).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(GrassmannConnection, TorsionFreeAndMetricOnSphere) {
    std::mt19937_64 rng(20);
    const MetricFamily m = MetricFamily::round_sphere(2, 1.0);
    for (double alpha : {1.0, 2.7}) {
        for (int sample = 0; sample < 2; ++sample) {
            const GrassmannPoint c = random_grassmann_point(m, 1, rng);
            const BundleChart chart(m, c);
            const Vec z0 = 0.2 * random_vector(chart.dim(), rng);
            const Array3 G = connection_coefficients(chart, z0, {alpha});
            EXPECT_LE(torsion_residual(G, chart.dim()), 1e-6);
            EXPECT_LE(compatibility_residual(chart, z0, G, {alpha}), 1e-6);
        }
    }
}

TEST(GrassmannConnection, TorsionFreeAndMetricOnProduct) {
    std::mt19937_64 rng(21);
    const MetricFamily m = MetricFamily::product_spheres(1.0, 1.0);
    const GrassmannPoint c = random_grassmann_point(m, 2, rng);
    const BundleChart chart(m, c);
    const Vec z0 = 0.2 * random_vector(chart.dim(), rng);
    const Array3 G = connection_coefficients(chart, z0, {2.7});
    EXPECT_LE(torsion_residual(G, chart.dim()), 1e-6);
    EXPECT_LE(compatibility_residual(chart, z0, G, {2.7}), 1e-6);
}

TEST(GrassmannConnection, ChartFieldsAgreeWithCoefficients) {
    std::mt19937_64 rng(22);
    const MetricFamily m = MetricFamily::round_sphere(2, 1.0);
    const GrassmannPoint c = random_grassmann_point(m, 1, rng);
    const BundleChart chart(m, c);
    const Vec z0 = Vec::Zero(3);
    const Array3 G = connection_coefficients(chart, z0, {});
    const ChartField x = [](const Vec&) { return Vec(Vec::Unit(3, 0)); };
    const ChartField y = [](const Vec&) { return Vec(Vec::Unit(3, 2)); };
    const BundleVector d = grassmann_connection(chart, x, y, z0, {});
    const Vec comps = components_in(chart.coordinate_basis(z0, {1e-4, 4}), d);
    for (int C = 0; C < 3; ++C) EXPECT_NEAR(comps[C], G(C, 0, 2), 1e-9);
}

TEST(GrassmannConnection, FibersAreTotallyGeodesic) {
    // Integrate the geodesic equation in a chart centred on the starting
    // point with unit vertical initial velocity; the base must stay put.
    std::mt19937_64 rng(23);
    const MetricFamily m = MetricFamily::round_sphere(2, 1.0);
    const GrassmannPoint c = random_grassmann_point(m, 1, rng);
    const BundleChart chart(m, c);
    const int D = chart.dim();
    auto rhs = [&](const Vec& state) {
        const Vec z = state.head(D), v = state.tail(D);
        const Array3 G = connection_coefficients(chart, z, {});
        Vec out(2 * D);
        out.head(D) = v;
        for (int C = 0; C < D; ++C) {
            double acc = 0.0;
            for (int A = 0; A < D; ++A)
                for (int B = 0; B < D; ++B) acc += G(C, A, B) * v[A] * v[B];
            out[D + C] = -acc;
        }
        return out;
    };
    Vec state = Vec::Zero(2 * D);
    state[D + 2] = 1.0;
    const int steps = 40;
    const double h = 1.0 / steps;
    for (int k = 0; k < steps; ++k) {
        const Vec k1 = rhs(state), k2 = rhs(state + 0.5 * h * k1), k3 = rhs(state + 0.5 * h * k2),
                  k4 = rhs(state + h * k3);
        state += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    EXPECT_LE(state.head(2).cwiseAbs().maxCoeff(), 1e-6);
    // The fiber is a unit circle of lines: after unit length the angle is 1.
    EXPECT_NEAR(std::atan(state[2]), 1.0, 1e-5);
}

}  // namespace gaussflow::test
