#pragma once

#include <utility>
#include <vector>

namespace ipm {

// integral over [0, 2pi) of |cos(theta)|^k exp(-cos^2(theta) t), adaptive
// panels split at the wells theta = pi/2, 3pi/2; relative error <= 1e-9.
double angular_integral(int k, double t);

struct PointwiseBound {
    double constant = 0.0;      // sup of (t+1)^{k/2} A^k e^{-A^2 t}
    double arg_amplitude = 0.0; // maximizing A in [0, 1]
    double arg_t = 0.0;         // maximizing t in [0, t_max]
};

// Empirical constant for the pointwise semigroup-derivative bound: grid scan
// over t with a golden-section inner maximization over A, then a
// golden-section polish over t around the best grid cell.
PointwiseBound pointwise_bound_constant(int k, double t_max);

struct ConvolutionBound {
    double sup_ratio = 0.0;
    double arg_t = 0.0;
};

// sup over t in [0, t_max] of (t+1)^delta * integral over [0, t] of
// (t-s+1)^{-delta} (s+1)^{-1-eta} ds. The integral uses geometric panels
// refined toward both endpoints; the sup uses a log-spaced t grid plus a
// golden-section polish.
ConvolutionBound convolution_bound(double delta, double eta, double t_max);

struct GronwallResult {
    std::vector<std::pair<double, double>> trajectory; // (t, f(t)) samples
    // sup over samples of f(t) (t+1)^{5/2} / (f0 + A): the ratio at the
    // advertised order. Grows without bound for A > 0.
    double sup_ratio_stated = 0.0;
    double arg_t_stated = 0.0;
    // sup of f(t) (t+1)^2 / (f0 + A): the order the worst-case ODE actually
    // delivers; saturates for every f0 >= 0, A >= 0.
    double sup_ratio_observed = 0.0;
    double arg_t_observed = 0.0;
};

// Integrates the saturated comparison ODE f' = -f/sqrt(t+1) + A/(t+1)^{5/2}
// with adaptive fifth-order stepping (local tolerance 1e-10 relative),
// sampling the trajectory on a log-spaced grid. f0 = 0 is allowed (with
// A = 0 it yields the zero trajectory).
GronwallResult gronwall_ode(double f0, double A, double t_max);

} // namespace ipm
