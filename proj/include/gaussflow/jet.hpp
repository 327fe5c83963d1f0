// jet.hpp - truncated Taylor jets for forward-mode derivatives.
//
// Jet<N, 1> carries value and gradient in N variables, Jet<N, 2> adds the
// Hessian. Reference metrics and parametrizations are written once as
// templates over the scalar type and evaluated with double, Jet<N,1> or
// Jet<N,2> depending on how many derivatives the caller needs.

#pragma once

#include <array>
#include <cmath>

namespace gaussflow {

template <int N, int Order>
struct Jet {
    static_assert(Order == 1 || Order == 2);
    static constexpr int kHess = Order == 2 ? N * N : 0;

    double v = 0.0;
    std::array<double, N> d{};
    std::array<double, kHess> h{};

    Jet() = default;
    Jet(double value) : v(value) {}  // NOLINT: implicit constants are intended

    static Jet variable(double value, int index) {
        Jet j(value);
        j.d[index] = 1.0;
        return j;
    }

    double hess(int a, int b) const {
        if constexpr (Order == 2) {
            return h[a * N + b];
        } else {
            return 0.0;
        }
    }
};

// Applies a scalar function with first and second derivative f1, f2.
template <int N, int O>
Jet<N, O> chain(const Jet<N, O>& x, double f0, double f1, double f2) {
    Jet<N, O> r(f0);
    for (int a = 0; a < N; ++a) r.d[a] = f1 * x.d[a];
    if constexpr (O == 2) {
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b)
                r.h[a * N + b] = f1 * x.h[a * N + b] + f2 * x.d[a] * x.d[b];
    }
    return r;
}

template <int N, int O>
Jet<N, O> operator+(const Jet<N, O>& x, const Jet<N, O>& y) {
    Jet<N, O> r(x.v + y.v);
    for (int a = 0; a < N; ++a) r.d[a] = x.d[a] + y.d[a];
    for (int a = 0; a < Jet<N, O>::kHess; ++a) r.h[a] = x.h[a] + y.h[a];
    return r;
}

template <int N, int O>
Jet<N, O> operator-(const Jet<N, O>& x, const Jet<N, O>& y) {
    Jet<N, O> r(x.v - y.v);
    for (int a = 0; a < N; ++a) r.d[a] = x.d[a] - y.d[a];
    for (int a = 0; a < Jet<N, O>::kHess; ++a) r.h[a] = x.h[a] - y.h[a];
    return r;
}

template <int N, int O>
Jet<N, O> operator-(const Jet<N, O>& x) {
    Jet<N, O> r(-x.v);
    for (int a = 0; a < N; ++a) r.d[a] = -x.d[a];
    for (int a = 0; a < Jet<N, O>::kHess; ++a) r.h[a] = -x.h[a];
    return r;
}

template <int N, int O>
Jet<N, O> operator*(const Jet<N, O>& x, const Jet<N, O>& y) {
    Jet<N, O> r(x.v * y.v);
    for (int a = 0; a < N; ++a) r.d[a] = x.d[a] * y.v + x.v * y.d[a];
    if constexpr (O == 2) {
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b)
                r.h[a * N + b] = x.h[a * N + b] * y.v + x.v * y.h[a * N + b] +
                                 x.d[a] * y.d[b] + x.d[b] * y.d[a];
    }
    return r;
}

template <int N, int O>
Jet<N, O> operator/(const Jet<N, O>& x, const Jet<N, O>& y) {
    const double inv = 1.0 / y.v;
    return x * chain(y, inv, -inv * inv, 2.0 * inv * inv * inv);
}

template <int N, int O>
Jet<N, O> operator+(const Jet<N, O>& x, double c) { Jet<N, O> r = x; r.v += c; return r; }
template <int N, int O>
Jet<N, O> operator+(double c, const Jet<N, O>& x) { return x + c; }
template <int N, int O>
Jet<N, O> operator-(const Jet<N, O>& x, double c) { Jet<N, O> r = x; r.v -= c; return r; }
template <int N, int O>
Jet<N, O> operator-(double c, const Jet<N, O>& x) { return -x + c; }

template <int N, int O>
Jet<N, O> operator*(const Jet<N, O>& x, double c) {
    Jet<N, O> r(x.v * c);
    for (int a = 0; a < N; ++a) r.d[a] = x.d[a] * c;
    for (int a = 0; a < Jet<N, O>::kHess; ++a) r.h[a] = x.h[a] * c;
    return r;
}
template <int N, int O>
Jet<N, O> operator*(double c, const Jet<N, O>& x) { return x * c; }
template <int N, int O>
Jet<N, O> operator/(const Jet<N, O>& x, double c) { return x * (1.0 / c); }
template <int N, int O>
Jet<N, O> operator/(double c, const Jet<N, O>& y) {
    const double inv = 1.0 / y.v;
    return chain(y, c * inv, -c * inv * inv, 2.0 * c * inv * inv * inv);
}

template <int N, int O>
Jet<N, O> sin(const Jet<N, O>& x) {
    const double s = std::sin(x.v), c = std::cos(x.v);
    return chain(x, s, c, -s);
}
template <int N, int O>
Jet<N, O> cos(const Jet<N, O>& x) {
    const double s = std::sin(x.v), c = std::cos(x.v);
    return chain(x, c, -s, -c);
}
template <int N, int O>
Jet<N, O> exp(const Jet<N, O>& x) {
    const double e = std::exp(x.v);
    return chain(x, e, e, e);
}
template <int N, int O>
Jet<N, O> log(const Jet<N, O>& x) {
    return chain(x, std::log(x.v), 1.0 / x.v, -1.0 / (x.v * x.v));
}
template <int N, int O>
Jet<N, O> sqrt(const Jet<N, O>& x) {
    const double s = std::sqrt(x.v);
    return chain(x, s, 0.5 / s, -0.25 / (s * x.v));
}
template <int N, int O>
Jet<N, O> cosh(const Jet<N, O>& x) {
    return chain(x, std::cosh(x.v), std::sinh(x.v), std::cosh(x.v));
}
template <int N, int O>
Jet<N, O> sinh(const Jet<N, O>& x) {
    return chain(x, std::sinh(x.v), std::cosh(x.v), std::sinh(x.v));
}

// Value extraction that works for both double and jets.
inline double value_of(double x) { return x; }
template <int N, int O>
double value_of(const Jet<N, O>& x) { return x.v; }

}  // namespace gaussflow
