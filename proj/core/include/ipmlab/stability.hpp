#pragma once

#include "ipmlab/field.hpp"
#include "ipmlab/profile.hpp"

#include <string>
#include <utility>
#include <vector>

namespace ipm {

// Report for the linear-stability quadratic form
//   Q[g] = (Omega'(y) * Pg, g),   P = multiplier k1^2/|k|^2 (2D),
//                                     (k1^2+k2^2)/|k|^2 (3D),
// evaluated exactly on the Fourier side (the vertical profile factor enters
// as a short convolution, so no quadrature aliasing). Two lower bounds are
// carried: one in |R1 g|^2 valid when the third derivative of the profile is
// nonpositive, one in |R g|^2 with a Poincare correction valid whenever the
// slope stays positive.
struct FormReport {
    double q = 0.0;            // (Omega' Pg, g)
    double r1g_sq = 0.0;       // sum sigma |g_k|^2   = |R1 g|^2
    double rg_sq = 0.0;        // sum sigma^2 |g_k|^2 = |R g|^2
    double c = 0.0;            // grid minimum of Omega'
    double om3_plus_sup = 0.0; // grid sup of max(Omega''', 0)

    double bound_r1 = 0.0; // c * r1g_sq
    double margin_r1 = 0.0;
    bool hyp_r1_met = false; // Omega''' <= 0 on the grid (1e-12 slack), c > 0

    double bound_r = 0.0; // (c - om3_plus_sup/(2 pi^2)) * rg_sq
    double margin_r = 0.0;
    bool hyp_r_met = false; // c > 0

    std::string applied; // "r1", "r", or "none"
    double lower_bound = 0.0;
    double margin = 0.0;
    bool hypotheses_met = false;

    std::string to_json() const;
};

FormReport quadratic_form(const StratifiedProfile& profile, const SpectralField& g,
                          int profile_grid = 4096);

// Admissibility audit of a profile: (A) periodicity, (B) slope bounded below
// by a positive constant, (C) positive part of the third derivative below
// c*pi^2/2, (D) derivative sup-norms finite through order 21.
struct ConditionReport {
    bool periodic = false;
    bool positive_slope = false;
    bool third_derivative_small = false;
    bool derivatives_bounded = false;

    double c = 0.0;
    double om3_plus_sup = 0.0;
    double endpoint_mismatch = 0.0;       // max_{p<=3} |w^(p)(pi) - w^(p)(-pi)|
    double reconstruction_residual = 0.0; // off-grid |raw - fit| when a raw callable exists
    std::vector<double> derivative_sup;   // orders 0..21 of omega

    bool all() const {
        return periodic && positive_slope && third_derivative_small && derivatives_bounded;
    }
    std::string to_json() const;
};

ConditionReport profile_conditions(const StratifiedProfile& profile, int grid_points = 4096);

// |u . grad rho|_{L2} with u induced by rho and the product dealiased; zero
// (to spectral tolerance) exactly for x-independent fields and other states
// the truncated nonlinearity annihilates.
double stationarity_residual(const SpectralField& rho);

// Both sides of the buoyancy-flux identity: (integral of u_vert * rho,
// integral of |u|^2), equal mode by mode for every real field.
std::pair<double, double> energy_identity_check(const SpectralField& rho);

} // namespace ipm
