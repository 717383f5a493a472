#pragma once

#include "ipmlab/field.hpp"

#include <functional>
#include <string>

namespace ipm {

struct KVec {
    int k1 = 0, k2 = 0, k3 = 0;
    double norm2() const {
        return double(k1) * k1 + double(k2) * k2 + double(k3) * k3;
    }
    bool is_zero() const { return k1 == 0 && k2 == 0 && k3 == 0; }
};

// Fourier multiplier: a symbol on integer wavenumbers plus an explicit value
// at the zero mode. Riesz-type symbols are 0/0 at k = 0; the convention here
// sets them to 0 there, so the mean of a field rides through untouched only
// when the zero-mode value is 1 (identity) and is annihilated otherwise.
class FourierMultiplier {
public:
    using Symbol = std::function<cdouble(const KVec&)>;

    FourierMultiplier(Symbol symbol, cdouble zero_mode_value = 0.0, std::string name = "multiplier");

    cdouble eval(const KVec& k) const { return k.is_zero() ? zero_ : symbol_(k); }
    cdouble zero_mode_value() const { return zero_; }
    const std::string& name() const { return name_; }

    // coeff_out(k) = eval(k) * coeff_in(k). Throws NumericError naming the
    // offending wavevector if the symbol produces a non-finite value.
    SpectralField apply(const SpectralField& f) const;

private:
    Symbol symbol_;
    cdouble zero_;
    std::string name_;
};

// Symbol library. `dimension` selects the 2D or 3D form where they differ.
FourierMultiplier identity_multiplier();
FourierMultiplier riesz(int axis);                    // -i k_axis/|k|
FourierMultiplier derivative(int axis);               // i k_axis
FourierMultiplier lambda_power(double j);             // |k|^j
FourierMultiplier inverse_laplacian();                // -1/|k|^2  (solves -lap psi = f up to sign)

// The damping operator of the linearized equation: symbol k1^2/|k|^2 in 2D,
// (k1^2+k2^2)/|k|^2 in 3D (the squared horizontal fraction). R = -P.
double damping_fraction(const KVec& k, int dimension);
FourierMultiplier horizontal_projection_sq(int dimension);

// Linear semigroup symbol exp(-damping_fraction * t).
FourierMultiplier semigroup_multiplier(double t, int dimension);

} // namespace ipm
