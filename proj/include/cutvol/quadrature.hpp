#pragma once

#include <functional>

namespace cutvol {

struct QuadResult {
    double value = 0.0;
    double rel_error = 0.0;  // estimated, from the last refinement step
    int levels = 0;
};

// Tanh-sinh (double exponential) quadrature on [a, b].  Converges at machine
// precision for smooth integrands and keeps full accuracy for endpoint
// square-root singularities, which is what the radial tube profiles have.
QuadResult tanh_sinh(const std::function<double(double)>& f, double a, double b,
                     double rel_tol = 1e-12, int max_level = 12);

}  // namespace cutvol
