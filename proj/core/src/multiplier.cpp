#include "ipmlab/multiplier.hpp"

#include "ipmlab/errors.hpp"

#include <cmath>
#include <utility>

namespace ipm {

FourierMultiplier::FourierMultiplier(Symbol symbol, cdouble zero_mode_value, std::string name)
    : symbol_(std::move(symbol)), zero_(zero_mode_value), name_(std::move(name)) {}

SpectralField FourierMultiplier::apply(const SpectralField& f) const {
    SpectralField out(f.grid());
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto kv = f.grid().wavevector(i);
        const KVec k{kv[0], kv[1], kv[2]};
        const cdouble s = eval(k);
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
            throw NumericError(name_ + ": symbol non-finite at k = (" + std::to_string(k.k1) +
                               ", " + std::to_string(k.k2) + ", " + std::to_string(k.k3) + ")");
        out[i] = s * f[i];
    }
    return out;
}

FourierMultiplier identity_multiplier() {
    return FourierMultiplier([](const KVec&) { return cdouble(1.0, 0.0); }, 1.0, "identity");
}

FourierMultiplier riesz(int axis) {
    if (axis < 0 || axis > 2) throw ConfigError("riesz: axis must be 0, 1, or 2");
    return FourierMultiplier(
        [axis](const KVec& k) {
            const double ka = axis == 0 ? k.k1 : axis == 1 ? k.k2 : k.k3;
            return cdouble(0.0, -ka / std::sqrt(k.norm2()));
        },
        0.0, "riesz_" + std::to_string(axis + 1));
}

FourierMultiplier derivative(int axis) {
    if (axis < 0 || axis > 2) throw ConfigError("derivative: axis must be 0, 1, or 2");
    return FourierMultiplier(
        [axis](const KVec& k) {
            const double ka = axis == 0 ? k.k1 : axis == 1 ? k.k2 : k.k3;
            return cdouble(0.0, ka);
        },
        0.0, "d_" + std::to_string(axis + 1));
}

FourierMultiplier lambda_power(double j) {
    return FourierMultiplier(
        [j](const KVec& k) { return cdouble(std::pow(k.norm2(), 0.5 * j), 0.0); },
        j == 0.0 ? 1.0 : 0.0, "lambda^" + std::to_string(j));
}

FourierMultiplier inverse_laplacian() {
    return FourierMultiplier([](const KVec& k) { return cdouble(-1.0 / k.norm2(), 0.0); }, 0.0,
                             "inverse_laplacian");
}

double damping_fraction(const KVec& k, int dimension) {
    if (k.is_zero()) return 0.0;
    const double horiz =
        dimension == 2 ? double(k.k1) * k.k1 : double(k.k1) * k.k1 + double(k.k2) * k.k2;
    return horiz / k.norm2();
}

FourierMultiplier horizontal_projection_sq(int dimension) {
    return FourierMultiplier(
        [dimension](const KVec& k) { return cdouble(damping_fraction(k, dimension), 0.0); }, 0.0,
        "horizontal_projection_sq");
}

FourierMultiplier semigroup_multiplier(double t, int dimension) {
    if (t < 0.0) throw ConfigError("semigroup_multiplier: t must be nonnegative");
    return FourierMultiplier(
        [t, dimension](const KVec& k) {
            return cdouble(std::exp(-damping_fraction(k, dimension) * t), 0.0);
        },
        1.0, "semigroup");
}

} // namespace ipm
