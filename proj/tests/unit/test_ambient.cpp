// test_ambient.cpp - metric catalog, curvature and geodesic tests

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "gaussflow/ambient.hpp"
#include "test_support.hpp"

namespace gaussflow::test {

namespace {

std::vector<MetricFamily> catalog() {
    return {MetricFamily::euclidean(3),
            MetricFamily::flat_torus(2),
            MetricFamily::round_sphere(2, 1.0),
            MetricFamily::round_sphere(3, 1.3, 0.4),
            MetricFamily::hyperbolic(2, 1.0),
            MetricFamily::hyperbolic(3, 0.8, -0.2),
            MetricFamily::product_spheres(1.0, 1.0, 1.0),
            MetricFamily::product_spheres(0.7, 1.2),
            MetricFamily::warped_product(3, WarpProfile{1.0, 0.3, 0.2})};
}

// Christoffel symbols from central differences of eval_metric only.
Array3 christoffel_by_differences(const MetricFamily& m, const ChartPoint& x, double t, double h) {
    const int n = m.dim();
    std::vector<Mat> dg(n);
    for (int k = 0; k < n; ++k) {
        ChartPoint p = x, q = x;
        p.coords[k] += h;
        q.coords[k] -= h;
        dg[k] = (eval_metric(m, p, t) - eval_metric(m, q, t)) / (2.0 * h);
    }
    const Mat gi = eval_metric(m, x, t).inverse();
    Array3 G(n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int l = 0; l < n; ++l) s += 0.5 * gi(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
                G(k, i, j) = s;
            }
    return G;
}

}  // namespace

// =============================================================================
// Metric values
// =============================================================================

TEST(AmbientMetric, EuclideanIsIdentity) {
    const MetricFamily m = MetricFamily::euclidean(3);
    Vec x(3);
    x << 0.3, -2.0, 5.0;
    EXPECT_TRUE(eval_metric(m, ChartPoint(x), 4.0).isApprox(Mat::Identity(3, 3)));
}

TEST(AmbientMetric, RoundSphereOnEquator) {
    const MetricFamily m = MetricFamily::round_sphere(2, 1.0);
    Vec x(2);
    x << kPi / 2, 0.0;
    const Mat g = eval_metric(m, ChartPoint(x), 0.0);
    EXPECT_NEAR(g(0, 0), 1.0, 1e-15);
    EXPECT_NEAR(g(1, 1), 1.0, 1e-15);
    EXPECT_NEAR(g(0, 1), 0.0, 1e-15);
}

TEST(AmbientMetric, FlatTorusIsStatic) {
    const MetricFamily m = MetricFamily::flat_torus(2);
    Vec x(2);
    x << 7.0, -1.0;  // outside the fundamental domain: periodic coordinates are accepted
    for (double t : {0.0, 1.0, 100.0}) {
        EXPECT_TRUE(eval_metric(m, ChartPoint(x), t).isApprox(Mat::Identity(2, 2)));
        EXPECT_EQ(metric_time_derivative(m, ChartPoint(x), t).cwiseAbs().maxCoeff(), 0.0);
    }
}

TEST(AmbientMetric, OutOfDomainThrows) {
    const MetricFamily sphere = MetricFamily::round_sphere(2, 1.0);
    Vec pole(2);
    pole << 0.0, 1.0;
    EXPECT_THROW(eval_metric(sphere, ChartPoint(pole), 0.0), DomainError);
    Vec ok(2);
    ok << 1.0, 1.0;
    EXPECT_THROW(eval_metric(sphere, ChartPoint(ok), -0.1), DomainError);
    // f = 0 round sphere of radius 1 and n = 2 collapses at t = 1.
    EXPECT_NEAR(sphere.time_horizon(), 1.0, 1e-15);
    EXPECT_THROW(eval_metric(sphere, ChartPoint(ok), 1.0), DomainError);

    const MetricFamily hyp = MetricFamily::hyperbolic(2, 1.0);
    Vec below(2);
    below << 0.0, -0.5;
    EXPECT_THROW(christoffel(hyp, ChartPoint(below), 0.0), DomainError);
}

// =============================================================================
// Christoffel symbols
// =============================================================================

TEST(AmbientChristoffel, SphereAtSixtyDegreesMatchesDifferences) {
    const MetricFamily m = MetricFamily::round_sphere(2, 1.0);
    Vec x(2);
    x << kPi / 3, 0.0;
    const Array3 G = christoffel(m, ChartPoint(x), 0.0);
    const Array3 F = christoffel_by_differences(m, ChartPoint(x), 0.0, 1e-5);
    EXPECT_NEAR(G(0, 1, 1), F(0, 1, 1), 1e-9);
    EXPECT_NEAR(G(0, 1, 1), -0.4330127018922193, 1e-12);
}

TEST(AmbientChristoffel, CatalogMatchesDifferencesAndIsSymmetric) {
    std::mt19937_64 rng(11);
    for (const MetricFamily& m : catalog()) {
        const int n = m.dim();
        for (int s = 0; s < 20; ++s) {
            const ChartPoint x = random_point(m, rng);
            const double t = 0.05 * s / 20.0;
            const Array3 G = christoffel(m, x, t);
            const Array3 F = christoffel_by_differences(m, x, t, 1e-5);
            for (int k = 0; k < n; ++k)
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) {
                        EXPECT_EQ(G(k, i, j), G(k, j, i));
                        EXPECT_NEAR(G(k, i, j), F(k, i, j), 1e-7) << to_string(m.kind());
                    }
        }
    }
}

TEST(AmbientChristoffel, GridSampledConvergesToAnalytic) {
    const MetricFamily exact = MetricFamily::round_sphere(2, 1.0);
    Vec x(2);
    x << kPi / 3, 0.0;
    const double reference = christoffel(exact, ChartPoint(x), 0.0)(0, 1, 1);
    double prev = 0.0;
    for (int level = 0; level < 3; ++level) {
        // Lattice over theta in [pi/3 - 0.5, pi/3 + 0.5] with the sample point on a node.
        const int cells = 8 << level;
        DomainBox box;
        box.lo = Vec(2);
        box.hi = Vec(2);
        box.lo << kPi / 3 - 0.5, 0.0;
        box.hi << kPi / 3 + 0.5, 2.0 * kPi;
        box.periodic = {false, true};
        const GridTable table = sample_reference(exact.reference(), box, {cells + 1, 4 * cells});
        const MetricFamily grid = MetricFamily::grid_sampled(table);
        const double err = std::abs(christoffel(grid, ChartPoint(x), 0.0)(0, 1, 1) - reference);
        if (prev > 0.0) {
            EXPECT_GE(std::log2(prev / err), 1.9) << "level " << level;
        }
        prev = err;
    }
}

TEST(AmbientChristoffel, GridTableRoundTripsThroughFiles) {
    const MetricFamily exact = MetricFamily::round_sphere(2, 1.0);
    DomainBox box;
    box.lo = Vec(2);
    box.hi = Vec(2);
    box.lo << 0.5, 0.0;
    box.hi << 2.5, 2.0 * kPi;
    box.periodic = {false, true};
    const GridTable table = sample_reference(exact.reference(), box, {9, 16});
    const auto dir = std::filesystem::temp_directory_path();
    const std::string csv = (dir / "gaussflow_grid_test.csv").string();
    const std::string bin = (dir / "gaussflow_grid_test.bin").string();
    write_grid_csv(table, csv);
    write_grid_binary(table, bin);
    for (const GridTable& back : {read_grid_csv(csv), read_grid_binary(bin)}) {
        EXPECT_EQ(back.counts, table.counts);
        EXPECT_EQ(back.periodic, table.periodic);
        ASSERT_EQ(back.components.size(), table.components.size());
        for (std::size_t i = 0; i < table.components.size(); ++i)
            EXPECT_DOUBLE_EQ(back.components[i], table.components[i]);
    }
    std::remove(csv.c_str());
    std::remove(bin.c_str());
    EXPECT_THROW(read_grid_csv("/nonexistent/grid.csv"), IoError);
}

// =============================================================================
// Riemann and Ricci tensors
// =============================================================================

TEST(AmbientRiemann, ConstantCurvatureForms) {
    std::mt19937_64 rng(5);
    struct Case {
        MetricFamily m;
        double kappa;  // sectional curvature of g0
    };
    std::vector<Case> cases = {{MetricFamily::round_sphere(2, 1.0), 1.0},
                               {MetricFamily::round_sphere(3, 1.7), 1.0 / (1.7 * 1.7)},
                               {MetricFamily::round_sphere(4, 0.9), 1.0 / 0.81},
                               {MetricFamily::hyperbolic(2, 1.0), -1.0},
                               {MetricFamily::hyperbolic(3, 2.0), -0.25}};
    for (const Case& c : cases) {
        const int n = c.m.dim();
        for (int s = 0; s < 100; ++s) {
            const ChartPoint x = random_point(c.m, rng);
            const CurvatureData cd = curvature(c.m, x, 0.0);
            const Array4 L = cd.lowered();
            const Mat& g = cd.metric;
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    for (int cc = 0; cc < n; ++cc)
                        for (int d = 0; d < n; ++d)
                            EXPECT_NEAR(L(a, b, cc, d), c.kappa * (g(a, cc) * g(b, d) - g(a, d) * g(b, cc)), 1e-8);
            EXPECT_LE((cd.ricci - (n - 1) * c.kappa * g).cwiseAbs().maxCoeff(), 1e-8);
        }
    }
}

TEST(AmbientRiemann, HyperbolicPlaneRicciIsMinusMetric) {
    const MetricFamily m = MetricFamily::hyperbolic(2, 1.0);
    Vec x(2);
    x << 0.2, 0.7;
    const Mat g = eval_metric(m, ChartPoint(x), 0.0);
    EXPECT_LE((ricci_tensor(m, ChartPoint(x), 0.0) + g).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(AmbientRiemann, ProductSpheresMixedComponentsVanish) {
    const MetricFamily m = MetricFamily::product_spheres(1.0, 1.0);
    std::mt19937_64 rng(8);
    for (int s = 0; s < 20; ++s) {
        const Array4 R = riemann_tensor(m, random_point(m, rng), 0.0);
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                for (int c = 0; c < 4; ++c)
                    for (int d = 0; d < 4; ++d) {
                        const int f[] = {a / 2, b / 2, c / 2, d / 2};
                        const bool mixed = !(f[0] == f[1] && f[1] == f[2] && f[2] == f[3]);
                        if (mixed) {
                            EXPECT_EQ(R(a, b, c, d), 0.0);
                        }
                    }
    }
}

TEST(AmbientRiemann, SymmetriesAndBianchi) {
    std::mt19937_64 rng(13);
    for (const MetricFamily& m : catalog()) {
        const int n = m.dim();
        for (int s = 0; s < 100; ++s) {
            const CurvatureData cd = curvature(m, random_point(m, rng), 0.01);
            const Array4 L = cd.lowered();
            double worst = 0.0;
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    for (int c = 0; c < n; ++c)
                        for (int d = 0; d < n; ++d) {
                            worst = std::max(worst, std::abs(L(a, b, c, d) + L(b, a, c, d)));
                            worst = std::max(worst, std::abs(L(a, b, c, d) + L(a, b, d, c)));
                            worst = std::max(worst, std::abs(L(a, b, c, d) - L(c, d, a, b)));
                            worst = std::max(worst, std::abs(L(a, b, c, d) + L(a, c, d, b) + L(a, d, b, c)));
                        }
            EXPECT_LE(worst, 1e-8) << to_string(m.kind());
            EXPECT_LE((cd.ricci - cd.ricci.transpose()).cwiseAbs().maxCoeff(), 1e-10);
        }
    }
}

TEST(AmbientRiemann, ApplyRiemannVanishesOnRepeatedArguments) {
    const MetricFamily m = MetricFamily::product_spheres(1.0, 0.6);
    std::mt19937_64 rng(3);
    const Array4 R = riemann_tensor(m, random_point(m, rng), 0.0);
    const Vec X = random_vector(4, rng), Z = random_vector(4, rng);
    EXPECT_EQ(apply_riemann(R, X, X, Z).cwiseAbs().maxCoeff(), 0.0);
}

// =============================================================================
// Time dependence
// =============================================================================

TEST(AmbientFlow, HomothetySolvesNormalizedFlow) {
    std::mt19937_64 rng(21);
    for (const MetricFamily& m : catalog()) {
        if (!m.solves_normalized_flow()) continue;
        const double horizon = std::min(1.0, 0.9 * m.time_horizon());
        for (int s = 0; s < 100; ++s) {
            const ChartPoint x = random_point(m, rng);
            const double t = horizon * (s + 0.5) / 100.0;
            const Mat q = metric_time_derivative(m, x, t);
            const Mat g = eval_metric(m, x, t);
            const Mat ric = ricci_tensor(m, x, t);
            EXPECT_LE((q + ric - m.normalization() * g).cwiseAbs().maxCoeff(), 1e-8) << to_string(m.kind());
            // Closed-form rate against a central difference of the metric.
            const Mat fd = (eval_metric(m, x, t + 1e-5) - eval_metric(m, x, t - 1e-5)) / 2e-5;
            EXPECT_LE((q - fd).cwiseAbs().maxCoeff(), 1e-7);
        }
    }
}

TEST(AmbientFlow, ShrinkingSphereAtStart) {
    const MetricFamily m = MetricFamily::round_sphere(2, 1.0);
    Vec x(2);
    x << 1.1, 0.4;
    const Mat g = eval_metric(m, ChartPoint(x), 0.0);
    EXPECT_LE((metric_time_derivative(m, ChartPoint(x), 0.0) + g).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(AmbientFlow, ProductSpheresWithUnitNormalizationIsStatic) {
    const MetricFamily m = MetricFamily::product_spheres(1.0, 1.0, 1.0);
    for (double t : {0.0, 0.5, 3.0}) EXPECT_NEAR(m.scale(0, t), 1.0, 1e-15);
    EXPECT_TRUE(std::isinf(m.time_horizon()));
}

TEST(AmbientFlow, GridSampledTimeDerivativeNeedsInteriorTime) {
    const MetricFamily exact = MetricFamily::round_sphere(2, 1.0);
    DomainBox box;
    box.lo = Vec(2);
    box.hi = Vec(2);
    box.lo << 0.5, 0.0;
    box.hi << 2.5, 2.0 * kPi;
    box.periodic = {false, true};
    const MetricFamily grid = MetricFamily::grid_sampled(sample_reference(exact.reference(), box, {9, 16}));
    Vec x(2);
    x << 1.0, 1.0;
    EXPECT_THROW(metric_time_derivative(grid, ChartPoint(x), 0.0), DomainError);
    EXPECT_EQ(metric_time_derivative(grid, ChartPoint(x), 1.0).cwiseAbs().maxCoeff(), 0.0);
}

// =============================================================================
// Charts and geodesics
// =============================================================================

TEST(AmbientCharts, SphereChartTransitionPreservesPoint) {
    const MetricFamily m = MetricFamily::round_sphere(3, 1.0);
    Vec x(3);
    x << 0.1, 1.2, 0.3;  // close to a pole of chart 0
    const ChartPoint p(x, 0);
    const ChartPoint q = m.canonicalize(p);
    EXPECT_EQ(q.chart_id, 1);
    EXPECT_LE((sphere_embedding(m.reference(), p) - sphere_embedding(m.reference(), q)).norm(), 1e-14);
    const ChartPoint back = m.reference().transition(q, 0);
    EXPECT_LE((back.coords - x).norm(), 1e-12);
    // The metric is the same round metric in either chart.
    EXPECT_NO_THROW(eval_metric(m, q, 0.0));
}

TEST(AmbientGeodesic, GreatCircleAndTransportIsometry) {
    const MetricFamily m = MetricFamily::round_sphere(2, 1.0);
    Vec x(2), v(2);
    x << kPi / 2, 0.3;
    v << 0.0, 0.8;
    Mat frame(2, 2);
    frame << 1.0, 0.0, 0.0, 1.0;
    const TransportResult r = geodesic_transport(m, 0.0, ChartPoint(x), v, frame, 16);
    EXPECT_NEAR(r.end.coords[0], kPi / 2, 1e-12);
    EXPECT_NEAR(r.end.coords[1], 1.1, 1e-10);

    std::mt19937_64 rng(2);
    const ChartPoint p = random_point(m, rng);
    Vec w = 0.3 * random_vector(2, rng);
    Mat vecs(2, 2);
    vecs.col(0) = random_vector(2, rng);
    vecs.col(1) = random_vector(2, rng);
    const TransportResult s = geodesic_transport(m, 0.0, p, w, vecs, 16);
    const Mat g0 = eval_metric(m, p, 0.0), g1 = eval_metric(m, s.end, 0.0);
    EXPECT_LE((vecs.transpose() * g0 * vecs - s.transported.transpose() * g1 * s.transported).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_NEAR(double(w.transpose() * g0 * w), double(s.velocity.transpose() * g1 * s.velocity), 1e-8);
}

}  // namespace gaussflow::test
