#pragma once

#include <array>
#include <cstddef>

namespace ipm {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

bool is_power_of_two(int n);

// Uniform periodic grid on [-pi, pi)^d with d in {2, 3} and N points per axis
// (power of two, N >= 8). Wavenumbers per axis are the integers in
// [-N/2, N/2), stored in FFT order: index i maps to k = i for i < N/2 and
// k = i - N otherwise, so the Nyquist mode -N/2 sits at index N/2.
class Grid {
public:
    Grid(int dimension, int points_per_axis);

    int dimension() const { return dim_; }
    int n() const { return n_; }
    std::size_t size() const; // N^d
    double spacing() const { return kTwoPi / n_; }
    double cell_volume() const;

    // Physical coordinate of a 1D index: -pi + i*spacing.
    double coordinate(int index) const { return -kPi + spacing() * index; }

    int wavenumber(int index) const { return index < n_ / 2 ? index : index - n_; }
    int index_of(int wavenumber) const { return wavenumber >= 0 ? wavenumber : wavenumber + n_; }

    // Row-major flattening; axis 0 is the slowest. In 2D idx[2] must be 0.
    std::size_t flatten(const std::array<int, 3>& idx) const;
    std::array<int, 3> unflatten(std::size_t flat) const;

    // Integer wavevector of a flat coefficient index (third component 0 in 2D).
    std::array<int, 3> wavevector(std::size_t flat) const;

    bool operator==(const Grid&) const = default;

private:
    int dim_;
    int n_;
};

} // namespace ipm
