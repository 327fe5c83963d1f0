// test_support.hpp - shared sampling helpers for the unit tests

#pragma once

#include <random>

#include "gaussflow/ambient.hpp"

namespace gaussflow::test {

constexpr double kPi = 3.14159265358979323846;

// Random point well inside chart 0 of the given family.
inline ChartPoint random_point(const MetricFamily& m, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int n = m.dim();
    Vec x(n);
    switch (m.kind()) {
        case MetricKind::round_sphere:
            for (int i = 0; i < n; ++i) x[i] = i + 1 < n ? 0.6 + (kPi - 1.2) * u(rng) : 2.0 * kPi * u(rng);
            break;
        case MetricKind::product_spheres:
            x << 0.6 + (kPi - 1.2) * u(rng), 2.0 * kPi * u(rng), 0.6 + (kPi - 1.2) * u(rng), 2.0 * kPi * u(rng);
            break;
        case MetricKind::hyperbolic:
            for (int i = 0; i < n; ++i) x[i] = i + 1 < n ? -1.0 + 2.0 * u(rng) : 0.5 + u(rng);
            break;
        case MetricKind::warped_product:
            for (int i = 0; i < n; ++i) x[i] = -0.5 + u(rng);
            break;
        default:
            for (int i = 0; i < n; ++i) x[i] = 2.0 * kPi * u(rng);
    }
    return ChartPoint(x, 0);
}

inline Vec random_vector(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = g(rng);
    return v;
}

}  // namespace gaussflow::test
