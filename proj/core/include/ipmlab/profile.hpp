#pragma once

#include <functional>
#include <string>
#include <vector>

namespace ipm {

// Stratified steady state Omega(y) = K*y + omega(y) on the 2*pi-periodic
// vertical coordinate, with omega held as a real trigonometric polynomial
//   omega(y) = sum_{m>=1} a_m sin(m y) + sum_{m>=0} b_m cos(m y)
// so derivatives of every order are available analytically. K may be any
// real number; positivity of Omega' is a reported condition, not a
// construction-time constraint.
class StratifiedProfile {
public:
    // Omega(y) = y.
    StratifiedProfile() : StratifiedProfile(1.0, {}, {}) {}

    // sin_coeffs[i] multiplies sin((i+1) y); cos_coeffs[i] multiplies cos(i y).
    StratifiedProfile(double K, std::vector<double> sin_coeffs,
                      std::vector<double> cos_coeffs = {});

    // Fits a trig polynomial through equispaced samples of omega taken at
    // y_j = -pi + 2*pi*j/M. Coefficients below 1e-13 in magnitude are dropped.
    static StratifiedProfile from_samples(double K, const std::vector<double>& omega_samples);

    // Samples the callable and fits; the callable itself is retained so
    // periodicity can later be audited against the original function.
    static StratifiedProfile from_function(double K, std::function<double(double)> omega,
                                           int samples = 256);

    double K() const { return k_; }

    double omega(double y) const { return omega_derivative(0, y); }
    // p-th derivative of omega, analytic via the quarter-turn phase shift.
    double omega_derivative(int order, double y) const;

    double Omega(double y) const { return k_ * y + omega(y); }
    double Omega_prime(double y) const { return k_ + omega_derivative(1, y); }
    double Omega_third(double y) const { return omega_derivative(3, y); }

    const std::vector<double>& sin_coeffs() const { return sin_; }
    const std::vector<double>& cos_coeffs() const { return cos_; }

    // Original callable when built via from_function, else nullptr.
    const std::function<double(double)>* raw_callable() const {
        return raw_ ? &raw_ : nullptr;
    }

    // Human-readable formula, e.g. "2*y + 1*sin(1*y)", for manifests.
    std::string describe() const;

private:
    double k_;
    std::vector<double> sin_; // a_m at index m-1
    std::vector<double> cos_; // b_m at index m
    std::function<double(double)> raw_;
};

} // namespace ipm
