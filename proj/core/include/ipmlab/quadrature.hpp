#pragma once

#include <functional>
#include <vector>

namespace ipm {

// Gauss-Legendre rule of the given order on [-1, 1]; computed once per order
// by Newton iteration on the Legendre recurrence and cached.
const std::vector<double>& gauss_legendre_nodes(int order);
const std::vector<double>& gauss_legendre_weights(int order);

// Single fixed-order panel over [a, b].
double gl_panel(const std::function<double(double)>& f, double a, double b, int order);

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
    bool converged = false;
};

// Adaptive bisection: each panel is accepted when embedded orders 12 and 24
// agree to the panel's tolerance share, otherwise split. Narrow interior
// features are resolved by the bisection cascade; max_depth bounds it.
QuadResult adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                              double rtol = 1e-9, double atol = 1e-10, int max_depth = 48);

} // namespace ipm
