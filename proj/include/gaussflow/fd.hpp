// fd.hpp - finite-difference weights and stencils.

#pragma once

#include <vector>

namespace gaussflow {

// Weights for the derivative of order `deriv` at x0 from samples at `nodes`
// (Fornberg's recursion). Exact for polynomials of degree < nodes.size().
std::vector<double> fornberg_weights(double x0, const std::vector<double>& nodes, int deriv);

// Integer-offset stencil for unit spacing; divide by h^deriv for spacing h.
struct Stencil {
    std::vector<int> offsets;
    std::vector<double> weights;
};

// Centered stencil of the given accuracy order (2, 4 or 6).
Stencil central_stencil(int deriv, int accuracy);

// Stencil of the given accuracy using only offsets in [-below, above]. Falls
// back to the centered stencil when both sides have room, otherwise shifts
// the node window toward the available side. Throws StencilError when the
// window does not fit.
Stencil fitted_stencil(int deriv, int accuracy, int below, int above);

// Applies a stencil to a callable sample(offset) -> T with spacing h.
template <class T, class Sample>
T apply_stencil(const Stencil& s, double h, int deriv, Sample&& sample) {
    double scale = 1.0;
    for (int k = 0; k < deriv; ++k) scale /= h;
    T acc = sample(s.offsets[0]) * (s.weights[0] * scale);
    for (std::size_t k = 1; k < s.offsets.size(); ++k) {
        if (s.weights[k] == 0.0) continue;
        acc += sample(s.offsets[k]) * (s.weights[k] * scale);
    }
    return acc;
}

// Step and accuracy for derivatives taken by sampling a smooth function.
struct DiffConfig {
    double step = 1e-4;
    int order = 4;
};

}  // namespace gaussflow
