#pragma once

#include <functional>

namespace enskog {

// Adaptive Gauss-Kronrod (G7, K15) quadrature with interval bisection.
// Splits until the per-interval Kronrod error estimate sums below abs_tol.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-10, int max_depth = 60);

}  // namespace enskog
