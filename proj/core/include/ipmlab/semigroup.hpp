#pragma once

#include "ipmlab/field.hpp"
#include "ipmlab/grid.hpp"

#include <functional>
#include <vector>

namespace ipm {

// Exact per-mode evolution of the constant-coefficient linearization:
// coefficient at k is multiplied by exp(-damping_fraction(k) * t). Modes
// with no horizontal content (and the mean) ride through unchanged.
// t < 0 is a domain error.
SpectralField torus_propagate(const SpectralField& rho0, double t);

// Vertical-coordinate coefficient G(y, t) of the variable-coefficient linear
// equation d/dt rho = -(1 - G) P rho, together with its smallness contract:
// decay claims only apply while the certificate stays below delta.
struct PerturbationCoefficient {
    std::function<double(double, double)> g; // (y, t) -> value
    double delta = 0.05;
    int sobolev_order = 11;
};

// sup over sampled times in [t0, t1] and derivative orders 0..sobolev_order
// of the grid sup-norm of d^p/dy^p G(., t), derivatives taken on the trig
// interpolant through the grid's vertical points.
double perturbation_certificate(const PerturbationCoefficient& coeff, const Grid& grid, double t0,
                                double t1, int time_samples = 9);

// Classical fourth-order integration of d/dt rho = -(1 - G(y, t)) P rho.
// Preconditions: the vertical-only (horizontal-mean) part of rho0 vanishes
// to spectral tolerance, and the certificate of G over [0, t] is within
// delta. The effective step is min(dt, 0.5, 2.5/(1+delta)); a step that
// grows the L2 norm beyond 1 + 1e-6 raises StabilityError advising a
// smaller dt.
SpectralField perturbed_propagate(const SpectralField& rho0, const PerturbationCoefficient& coeff,
                                  double t, double dt);

struct PerturbedRecord {
    double t = 0.0;
    std::vector<double> norms; // parallel to the scan's s_list
    double mean_abs = 0.0;
    double l2 = 0.0;
};

struct PerturbedScan {
    std::vector<double> s_list;
    std::vector<PerturbedRecord> records;
};

// Same integration as perturbed_propagate, recording Sobolev norms at the
// requested times (which must be ascending and inside [0, t_end]).
PerturbedScan perturbed_scan(const SpectralField& rho0, const PerturbationCoefficient& coeff,
                             double t_end, double dt, const std::vector<double>& record_times,
                             const std::vector<double>& s_list = {0.0, 8.0});

} // namespace ipm
