// fd.cpp - Fornberg weights and stencil selection.

#include "gaussflow/fd.hpp"

#include "gaussflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace gaussflow {

std::vector<double> fornberg_weights(double x0, const std::vector<double>& nodes, int deriv) {
    const int n = int(nodes.size());
    if (deriv >= n) throw StencilError("not enough nodes for requested derivative");
    // c[k][j] holds the weight of node j for derivative k.
    std::vector<std::vector<double>> c(deriv + 1, std::vector<double>(n, 0.0));
    double c1 = 1.0;
    double c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, deriv);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = nodes[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    return c[deriv];
}

namespace {

Stencil make_stencil(int deriv, int first, int last) {
    Stencil s;
    std::vector<double> nodes;
    for (int k = first; k <= last; ++k) {
        s.offsets.push_back(k);
        nodes.push_back(double(k));
    }
    s.weights = fornberg_weights(0.0, nodes, deriv);
    for (double& w : s.weights)
        if (std::abs(w) < 1e-13) w = 0.0;
    return s;
}

}  // namespace

Stencil central_stencil(int deriv, int accuracy) {
    if (accuracy % 2 != 0 || accuracy < 2) throw StencilError("central stencils need even accuracy");
    // Centered stencils of a derivative of order d and accuracy p use
    // 2 * floor((d + 1) / 2) - 1 + p nodes.
    const int half = (2 * ((deriv + 1) / 2) - 1 + accuracy) / 2;
    static std::mutex mutex;
    static std::map<std::pair<int, int>, Stencil> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto key = std::make_pair(deriv, accuracy);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    Stencil s = make_stencil(deriv, -half, half);
    cache.emplace(key, s);
    return s;
}

Stencil fitted_stencil(int deriv, int accuracy, int below, int above) {
    const int half = (2 * ((deriv + 1) / 2) - 1 + accuracy) / 2;
    if (below >= half && above >= half) return central_stencil(deriv, accuracy);
    // One-sided window: deriv + accuracy nodes.
    const int width = deriv + accuracy;
    if (below + above + 1 < width) throw StencilError("stencil does not fit between the boundaries");
    int first = -std::min(below, width - 1);
    int last = first + width - 1;
    if (last > above) {
        last = above;
        first = last - width + 1;
    }
    static std::mutex mutex;
    static std::map<std::tuple<int, int, int>, Stencil> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto key = std::make_tuple(deriv, first, last);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    Stencil s = make_stencil(deriv, first, last);
    cache.emplace(key, s);
    return s;
}

}  // namespace gaussflow
