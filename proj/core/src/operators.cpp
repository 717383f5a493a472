#include "ipmlab/operators.hpp"

#include "ipmlab/errors.hpp"
#include "ipmlab/fft.hpp"

#include <cmath>

namespace ipm {

double sobolev_norm(const SpectralField& f, double s) {
    if (s < 0.0) throw ConfigError("sobolev_norm: s must be nonnegative");
    const Grid& g = f.grid();
    double sum = 0.0;
    if (s == 0.0) {
        for (std::size_t i = 0; i < f.size(); ++i) sum += std::norm(f[i]);
    } else {
        for (std::size_t i = 0; i < f.size(); ++i) {
            auto k = g.wavevector(i);
            const double k2 = double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2];
            sum += std::pow(1.0 + k2, s) * std::norm(f[i]);
        }
    }
    return std::sqrt(sum);
}

cdouble mean_value(const SpectralField& f) {
    return f[0] / std::pow(kTwoPi, 0.5 * f.grid().dimension());
}

double l2_norm_physical(const std::vector<double>& phys, const Grid& g) {
    if (phys.size() != g.size()) throw ConfigError("l2_norm_physical: sample count mismatch");
    double s = 0.0;
    for (double v : phys) s += v * v;
    return std::sqrt(s * g.cell_volume());
}

SpectralField partial_derivative(const SpectralField& f, int axis) {
    if (axis < 0 || axis >= f.grid().dimension())
        throw ConfigError("partial_derivative: axis out of range");
    SpectralField out(f.grid());
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto k = f.grid().wavevector(i);
        out[i] = cdouble(0.0, k[axis]) * f[i];
    }
    return out;
}

std::pair<SpectralField, SpectralField> velocity_from_density_2d(const SpectralField& rho) {
    if (rho.grid().dimension() != 2)
        throw ConfigError("velocity_from_density_2d: 2D field required");
    SpectralField u1(rho.grid()), u2(rho.grid());
    for (std::size_t i = 0; i < rho.size(); ++i) {
        auto k = rho.grid().wavevector(i);
        const double k2 = double(k[0]) * k[0] + double(k[1]) * k[1];
        if (k2 == 0.0) continue;
        u1[i] = rho[i] * (-double(k[0]) * k[1] / k2);
        u2[i] = rho[i] * (double(k[0]) * k[0] / k2);
    }
    return {std::move(u1), std::move(u2)};
}

std::array<SpectralField, 3> velocity_from_density_3d(const SpectralField& rho) {
    if (rho.grid().dimension() != 3)
        throw ConfigError("velocity_from_density_3d: 3D field required");
    std::array<SpectralField, 3> u{SpectralField(rho.grid()), SpectralField(rho.grid()),
                                   SpectralField(rho.grid())};
    for (std::size_t i = 0; i < rho.size(); ++i) {
        auto k = rho.grid().wavevector(i);
        const double k2 = double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2];
        if (k2 == 0.0) continue;
        u[0][i] = rho[i] * (-double(k[0]) * k[2] / k2);
        u[1][i] = rho[i] * (-double(k[1]) * k[2] / k2);
        u[2][i] = rho[i] * ((double(k[0]) * k[0] + double(k[1]) * k[1]) / k2);
    }
    return u;
}

double divergence_defect_2d(const SpectralField& u1, const SpectralField& u2) {
    double defect = 0.0;
    for (std::size_t i = 0; i < u1.size(); ++i) {
        auto k = u1.grid().wavevector(i);
        defect = std::max(defect, std::abs(double(k[0]) * u1[i] + double(k[1]) * u2[i]));
    }
    return defect;
}

double divergence_defect_3d(const SpectralField& u1, const SpectralField& u2,
                            const SpectralField& u3) {
    double defect = 0.0;
    for (std::size_t i = 0; i < u1.size(); ++i) {
        auto k = u1.grid().wavevector(i);
        defect = std::max(defect, std::abs(double(k[0]) * u1[i] + double(k[1]) * u2[i] +
                                           double(k[2]) * u3[i]));
    }
    return defect;
}

std::pair<SpectralField, SpectralField> bar_tilde_split(const SpectralField& rho) {
    SpectralField bar(rho.grid()), tilde(rho.grid());
    const int dim = rho.grid().dimension();
    for (std::size_t i = 0; i < rho.size(); ++i) {
        auto k = rho.grid().wavevector(i);
        const bool vertical_only = dim == 2 ? k[0] == 0 : (k[0] == 0 && k[1] == 0);
        (vertical_only ? tilde[i] : bar[i]) = rho[i];
    }
    return {std::move(bar), std::move(tilde)};
}

double grad_linf(const SpectralField& f) {
    const Grid& g = f.grid();
    const int dim = g.dimension();
    std::vector<double> sq(g.size(), 0.0);
    std::vector<double> phys(g.size());
    for (int axis = 0; axis < dim; ++axis) {
        phys = transform_inverse(partial_derivative(f, axis));
        for (std::size_t i = 0; i < phys.size(); ++i) sq[i] += phys[i] * phys[i];
    }
    double m = 0.0;
    for (double v : sq) m = std::max(m, v);
    return std::sqrt(m);
}

SpectralField dealias_truncate(const SpectralField& f) {
    SpectralField out = f;
    dealias_truncate_inplace(out);
    return out;
}

void dealias_truncate_inplace(SpectralField& f) {
    const Grid& g = f.grid();
    const int kc = g.n() / 3;
    const int dim = g.dimension();
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto k = g.wavevector(i);
        bool outside = std::abs(k[0]) > kc || std::abs(k[1]) > kc;
        if (dim == 3) outside = outside || std::abs(k[2]) > kc;
        if (outside) f[i] = 0.0;
    }
}

} // namespace ipm
