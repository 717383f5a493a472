#pragma once

#include "ipmlab/field.hpp"

#include <memory>
#include <vector>

namespace ipm {

// FFT engine bound to one grid. Owns transform plans plus aligned scratch, so
// repeated transforms in hot loops pay no planning or allocation cost.
// One instance is not safe for concurrent use; distinct instances are
// (plan construction is serialized globally).
class Fft {
public:
    explicit Fft(const Grid& g);
    ~Fft();
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;

    const Grid& grid() const { return grid_; }

    // Physical samples (real, row-major, N^d values) -> Parseval-normalized
    // coefficients. The output field is reshaped to this grid.
    void forward(const double* phys, SpectralField& out);

    // Coefficients -> physical samples. The imaginary residue of the inverse
    // transform (roundoff for Hermitian input) is discarded.
    void inverse(const SpectralField& in, double* phys);

private:
    Grid grid_;
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// One-shot conveniences backed by a shared per-grid engine cache.
// Throws ConfigError if the sample count does not match the grid.
SpectralField transform_forward(const std::vector<double>& physical, const Grid& g);
std::vector<double> transform_inverse(const SpectralField& f);

} // namespace ipm
