#pragma once

#include "ipmlab/field.hpp"

#include <array>
#include <utility>
#include <vector>

namespace ipm {

// |f|_{H^s} = sqrt(sum_k (1+|k|^2)^s |c(k)|^2); s = 0 recovers the L2 norm.
double sobolev_norm(const SpectralField& f, double s);

// Mean value of the field: c(0)/(2*pi)^{d/2}. Real to roundoff for real fields.
cdouble mean_value(const SpectralField& f);

// Physical-space L2 norm by grid quadrature, sqrt(h^d * sum f_j^2).
double l2_norm_physical(const std::vector<double>& phys, const Grid& g);

// Spectral derivative along an axis: multiplication by i*k_axis.
SpectralField partial_derivative(const SpectralField& f, int axis);

// Velocity reconstruction from the density perturbation.
// 2D:  u1^(k) = -(k1 k2/|k|^2) rho^(k),   u2^(k) = +(k1^2/|k|^2) rho^(k).
// 3D:  u1^ = -(k1 k3/|k|^2) rho^,  u2^ = -(k2 k3/|k|^2) rho^,
//      u3^ = +((k1^2+k2^2)/|k|^2) rho^.
// Zero mode of every component is 0; divergence-free by construction.
std::pair<SpectralField, SpectralField> velocity_from_density_2d(const SpectralField& rho);
std::array<SpectralField, 3> velocity_from_density_3d(const SpectralField& rho);

// max_k |k . u^(k)| over all modes, for divergence audits.
double divergence_defect_2d(const SpectralField& u1, const SpectralField& u2);
double divergence_defect_3d(const SpectralField& u1, const SpectralField& u2, const SpectralField& u3);

// Split into the vertical-average part (tilde: k1 = 0 modes in 2D, k1 = k2 = 0
// in 3D, a function of the vertical coordinate only) and the remainder (bar).
// bar + tilde reproduces the input exactly.
std::pair<SpectralField, SpectralField> bar_tilde_split(const SpectralField& rho);

// Grid maximum of |grad f| via spectral differentiation and inverse transform.
double grad_linf(const SpectralField& f);

// Zero every mode with any |k_axis| > floor(N/3) (two-thirds dealias box).
SpectralField dealias_truncate(const SpectralField& f);
void dealias_truncate_inplace(SpectralField& f);

} // namespace ipm
