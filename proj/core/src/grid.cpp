#include "ipmlab/grid.hpp"

#include "ipmlab/errors.hpp"

namespace ipm {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

Grid::Grid(int dimension, int points_per_axis) : dim_(dimension), n_(points_per_axis) {
    if (dim_ != 2 && dim_ != 3)
        throw ConfigError("grid dimension must be 2 or 3, got " + std::to_string(dim_));
    if (n_ < 8 || !is_power_of_two(n_))
        throw ConfigError("grid size must be a power of two >= 8, got " + std::to_string(n_));
}

std::size_t Grid::size() const {
    std::size_t s = 1;
    for (int d = 0; d < dim_; ++d) s *= static_cast<std::size_t>(n_);
    return s;
}

double Grid::cell_volume() const {
    double v = 1.0;
    for (int d = 0; d < dim_; ++d) v *= spacing();
    return v;
}

std::size_t Grid::flatten(const std::array<int, 3>& idx) const {
    if (dim_ == 2)
        return static_cast<std::size_t>(idx[0]) * n_ + idx[1];
    return (static_cast<std::size_t>(idx[0]) * n_ + idx[1]) * n_ + idx[2];
}

std::array<int, 3> Grid::unflatten(std::size_t flat) const {
    std::array<int, 3> idx{0, 0, 0};
    if (dim_ == 2) {
        idx[1] = static_cast<int>(flat % n_);
        idx[0] = static_cast<int>(flat / n_);
    } else {
        idx[2] = static_cast<int>(flat % n_);
        flat /= n_;
        idx[1] = static_cast<int>(flat % n_);
        idx[0] = static_cast<int>(flat / n_);
    }
    return idx;
}

std::array<int, 3> Grid::wavevector(std::size_t flat) const {
    auto idx = unflatten(flat);
    std::array<int, 3> k{0, 0, 0};
    for (int d = 0; d < dim_; ++d) k[d] = wavenumber(idx[d]);
    return k;
}

} // namespace ipm
