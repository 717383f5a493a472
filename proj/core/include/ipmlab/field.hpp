#pragma once

#include "ipmlab/grid.hpp"

#include <array>
#include <complex>
#include <vector>

namespace ipm {

using cdouble = std::complex<double>;

// Spectral representation of a real scalar field: the full complex coefficient
// array in FFT order. Normalization is fixed so that Parseval is exact:
//   sum_k |c(k)|^2 = integral |f|^2 over [-pi,pi)^d,
// i.e. c(k) = (2*pi)^{d/2} * DFT(f)(k) / N^d. A real field has Hermitian
// coefficients, c(-k) = conj(c(k)).
class SpectralField {
public:
    SpectralField() : grid_(2, 8), c_(64, 0.0) {}
    explicit SpectralField(const Grid& g) : grid_(g), c_(g.size(), 0.0) {}

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return c_.size(); }

    cdouble& operator[](std::size_t i) { return c_[i]; }
    const cdouble& operator[](std::size_t i) const { return c_[i]; }

    // Access by integer wavevector (third component ignored in 2D).
    cdouble& at(int k1, int k2, int k3 = 0);
    const cdouble& at(int k1, int k2, int k3 = 0) const;

    std::vector<cdouble>& data() { return c_; }
    const std::vector<cdouble>& data() const { return c_; }

    SpectralField& operator+=(const SpectralField& o);
    SpectralField& operator-=(const SpectralField& o);
    SpectralField& operator*=(double a);
    SpectralField& operator*=(cdouble a);

    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(SpectralField a, double s) { return a *= s; }
    friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

    double l2_norm() const;  // sqrt(sum |c|^2) = physical L2 norm by Parseval
    double max_abs() const;
    bool all_finite() const;

    // max_k |c(-k) - conj(c(k))|; zero (to roundoff) for real fields.
    double hermitian_defect() const;

private:
    Grid grid_;
    std::vector<cdouble> c_;
};

} // namespace ipm
