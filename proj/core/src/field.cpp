#include "ipmlab/field.hpp"

#include "ipmlab/errors.hpp"

#include <cmath>

namespace ipm {

namespace {

std::size_t wavevector_index(const Grid& g, int k1, int k2, int k3) {
    const int half = g.n() / 2;
    auto check = [&](int k) {
        if (k < -half || k >= half)
            throw ConfigError("wavenumber " + std::to_string(k) + " outside [-N/2, N/2) for N = " +
                              std::to_string(g.n()));
    };
    check(k1);
    check(k2);
    std::array<int, 3> idx{g.index_of(k1), g.index_of(k2), 0};
    if (g.dimension() == 3) {
        check(k3);
        idx[2] = g.index_of(k3);
    } else if (k3 != 0) {
        throw ConfigError("third wavenumber component must be 0 on a 2D grid");
    }
    return g.flatten(idx);
}

} // namespace

cdouble& SpectralField::at(int k1, int k2, int k3) {
    return c_[wavevector_index(grid_, k1, k2, k3)];
}

const cdouble& SpectralField::at(int k1, int k2, int k3) const {
    return c_[wavevector_index(grid_, k1, k2, k3)];
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
    if (!(grid_ == o.grid_)) throw ConfigError("field arithmetic requires matching grids");
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
    if (!(grid_ == o.grid_)) throw ConfigError("field arithmetic requires matching grids");
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

SpectralField& SpectralField::operator*=(double a) {
    for (auto& v : c_) v *= a;
    return *this;
}

SpectralField& SpectralField::operator*=(cdouble a) {
    for (auto& v : c_) v *= a;
    return *this;
}

double SpectralField::l2_norm() const {
    double s = 0.0;
    for (const auto& v : c_) s += std::norm(v);
    return std::sqrt(s);
}

double SpectralField::max_abs() const {
    double m = 0.0;
    for (const auto& v : c_) m = std::max(m, std::abs(v));
    return m;
}

bool SpectralField::all_finite() const {
    for (const auto& v : c_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

double SpectralField::hermitian_defect() const {
    const int n = grid_.n();
    double defect = 0.0;
    for (std::size_t i = 0; i < c_.size(); ++i) {
        auto idx = grid_.unflatten(i);
        std::array<int, 3> mirror{(n - idx[0]) % n, (n - idx[1]) % n, 0};
        if (grid_.dimension() == 3) mirror[2] = (n - idx[2]) % n;
        const cdouble d = c_[grid_.flatten(mirror)] - std::conj(c_[i]);
        defect = std::max(defect, std::abs(d));
    }
    return defect;
}

} // namespace ipm
