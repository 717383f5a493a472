#pragma once

#include "ipmlab/field.hpp"

#include <functional>

namespace ipm {

// Angular symbol applied under the whole-space propagated norm:
//   Identity -> 1, R1 -> |cos theta|, R1Squared -> cos^2 theta,
//   LambdaJ -> r^j (radial smoothing weight, exponent j = lambda_j).
enum class AngularWeight { Identity, R1, R1Squared, LambdaJ };

// Initial data given directly as its polar-coordinate transform
// profile(r, theta), square-integrable against r dr dtheta on
// [0, r_max] x [0, 2pi). The radial cutoff must capture the mass: the outer
// decade [0.9 r_max, r_max] may hold at most 1e-10 of the total.
struct RadialAngularSpec {
    std::function<cdouble(double, double)> profile;
    double r_max = 12.0;
    int n_r = 64;     // radial Gauss-Legendre order
    int n_theta = 16; // angular Gauss-Legendre order per dyadic panel
    double lambda_j = 0.0;
};

struct WholeSpaceNorm {
    double value = 0.0;
    double error_estimate = 0.0; // relative, by order-doubling comparison
    bool converged = false;      // error_estimate <= 1e-6
};

// L2 norm of the propagated, weighted solution:
//   value^2 = int int exp(-2 cos^2(theta) t) w^2 |profile|^2 r dr dtheta.
// Angular panels refine dyadically toward theta = pi/2 and 3pi/2 where the
// factor concentrates in an O(1/sqrt(t)) well; the result carries a
// Richardson-style error estimate from re-evaluating at doubled orders.
WholeSpaceNorm whole_space_norm(const RadialAngularSpec& spec, double t, AngularWeight weight);

// norm(t)/norm(0) for radial data: the radial factor separates and cancels,
// so the ratio is profile-independent. Evaluated through the same
// quadrature path as whole_space_norm.
double sharpness_radial(const std::function<double(double)>& radial_profile, double t);

// Lower-bound witness family concentrated on an angular window of width
// 2/(t+1) around pi/2, unit initial mass; returns its propagated norm
// (stays above a uniform positive floor for all t).
double sharpness_concentrated(double t);

} // namespace ipm
