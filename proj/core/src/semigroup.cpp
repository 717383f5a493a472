#include "ipmlab/semigroup.hpp"

#include "ipmlab/errors.hpp"
#include "ipmlab/fft.hpp"
#include "ipmlab/multiplier.hpp"
#include "ipmlab/operators.hpp"

#include <algorithm>
#include <cmath>

namespace ipm {

SpectralField torus_propagate(const SpectralField& rho0, double t) {
    return semigroup_multiplier(t, rho0.grid().dimension()).apply(rho0);
}

double perturbation_certificate(const PerturbationCoefficient& coeff, const Grid& grid, double t0,
                                double t1, int time_samples) {
    if (!coeff.g) throw ConfigError("perturbation_certificate: empty coefficient function");
    if (time_samples < 1) throw ConfigError("perturbation_certificate: time_samples must be >= 1");
    if (t1 < t0) throw ConfigError("perturbation_certificate: need t1 >= t0");
    if (coeff.sobolev_order < 0)
        throw ConfigError("perturbation_certificate: derivative order must be >= 0");

    const int n = grid.n();
    std::vector<cdouble> tw(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m) tw[std::size_t(m)] = std::polar(1.0, kTwoPi * m / n);

    double sup = 0.0;
    std::vector<double> vals(static_cast<std::size_t>(n));
    std::vector<cdouble> coef(static_cast<std::size_t>(n));
    for (int j = 0; j < time_samples; ++j) {
        const double tau = time_samples == 1 ? t0 : t0 + (t1 - t0) * j / (time_samples - 1);
        for (int i = 0; i < n; ++i) vals[std::size_t(i)] = coeff.g(-kPi + kTwoPi * i / n, tau);

        // Index-space DFT; the grid-origin phases cancel between analysis
        // and evaluation, so they are omitted on both sides.
        for (int k = 0; k < n; ++k) {
            cdouble s = 0.0;
            for (int i = 0; i < n; ++i)
                s += vals[std::size_t(i)] * std::conj(tw[std::size_t((k * i) % n)]);
            coef[std::size_t(k)] = s / double(n);
        }
        // DFT roundoff (~1e-16 of the peak) in high modes would be amplified
        // by wave^p under differentiation; drop it like the profile fitter.
        double cmax = 0.0;
        for (const cdouble& c : coef) cmax = std::max(cmax, std::abs(c));
        for (cdouble& c : coef)
            if (std::abs(c) <= 1e-13 * cmax) c = 0.0;
        for (int p = 0; p <= coeff.sobolev_order; ++p) {
            for (int i = 0; i < n; ++i) {
                cdouble v = 0.0;
                for (int k = 0; k < n; ++k) {
                    const int wave = k < n / 2 ? k : k - n;
                    if (p % 2 == 1 && k == n / 2) continue; // Nyquist has no odd-derivative sense
                    const cdouble ik = std::pow(cdouble(0.0, wave), p);
                    v += ik * coef[std::size_t(k)] * tw[std::size_t((k * i) % n)];
                }
                sup = std::max(sup, std::abs(v.real()));
            }
        }
    }
    return sup;
}

namespace {

class PerturbedStepper {
public:
    PerturbedStepper(const Grid& grid, const PerturbationCoefficient& coeff)
        : grid_(grid), coeff_(coeff), fft_(grid), phys_(grid.size()), sigma_(grid.size()),
          scaled_(grid), k1_(grid), k2_(grid), k3_(grid), k4_(grid), tmp_(grid) {
        const int dim = grid.dimension();
        for (std::size_t i = 0; i < grid.size(); ++i) {
            auto k = grid.wavevector(i);
            sigma_[i] = damping_fraction(KVec{k[0], k[1], k[2]}, dim);
        }
    }

    // Advances rho by one RK4 step of length h starting at time tau.
    void step(SpectralField& rho, double tau, double h) {
        derivative(rho, tau, k1_);
        stage(rho, 0.5 * h, k1_);
        derivative(tmp_, tau + 0.5 * h, k2_);
        stage(rho, 0.5 * h, k2_);
        derivative(tmp_, tau + 0.5 * h, k3_);
        stage(rho, h, k3_);
        derivative(tmp_, tau + h, k4_);
        const double w = h / 6.0;
        for (std::size_t i = 0; i < rho.size(); ++i)
            rho[i] += w * (k1_[i] + 2.0 * (k2_[i] + k3_[i]) + k4_[i]);
    }

private:
    // d/dt rho at time tau: -(1 - G(y, tau)) P rho. The vertical-only column
    // of the result is analytically empty (P annihilates it and the factor
    // depends on y alone), so it is zeroed to strip transform roundoff.
    void derivative(const SpectralField& rho, double tau, SpectralField& out) {
        for (std::size_t i = 0; i < rho.size(); ++i) scaled_[i] = sigma_[i] * rho[i];
        fft_.inverse(scaled_, phys_.data());
        const int n = grid_.n();
        gv_.resize(std::size_t(n));
        for (int i = 0; i < n; ++i)
            gv_[std::size_t(i)] = -(1.0 - coeff_.g(-kPi + kTwoPi * i / n, tau));
        for (std::size_t j = 0; j < phys_.size(); ++j) phys_[j] *= gv_[j % std::size_t(n)];
        fft_.forward(phys_.data(), out);
        for (std::size_t i = 0; i < out.size(); ++i)
            if (sigma_[i] == 0.0) out[i] = 0.0;
    }

    void stage(const SpectralField& rho, double w, const SpectralField& slope) {
        for (std::size_t i = 0; i < rho.size(); ++i) tmp_[i] = rho[i] + w * slope[i];
    }

    Grid grid_;
    const PerturbationCoefficient& coeff_;
    Fft fft_;
    std::vector<double> phys_;
    std::vector<double> sigma_;
    std::vector<double> gv_;
    SpectralField scaled_, k1_, k2_, k3_, k4_, tmp_;
};

void check_preconditions(const SpectralField& rho0, const PerturbationCoefficient& coeff,
                         double horizon) {
    auto [bar, tilde] = bar_tilde_split(rho0);
    (void)bar;
    if (tilde.l2_norm() > 1e-13 * rho0.l2_norm())
        throw ConfigError(
            "perturbed evolution requires initial data with vanishing horizontal mean "
            "(no vertical-only modes)");
    const double cert = perturbation_certificate(coeff, rho0.grid(), 0.0, horizon);
    if (cert > coeff.delta * (1.0 + 1e-12)) {
        throw ConfigError("perturbation certificate " + std::to_string(cert) +
                          " exceeds the smallness threshold " + std::to_string(coeff.delta));
    }
}

double effective_step(double dt, double delta) {
    return std::min({dt, 0.5, 2.5 / (1.0 + delta)});
}

// Marches rho to each target time in order, calling record(t) after landing.
void march(PerturbedStepper& stepper, SpectralField& rho, double dt_eff,
           const std::vector<double>& targets,
           const std::function<void(double)>& record) {
    double t = 0.0;
    double norm = rho.l2_norm();
    for (double target : targets) {
        while (t < target) {
            const double h = std::min(dt_eff, target - t);
            stepper.step(rho, t, h);
            t += h;
            const double after = rho.l2_norm();
            if (after > norm * (1.0 + 1e-6))
                throw StabilityError("perturbed step grew the L2 norm; reduce dt below " +
                                     std::to_string(h));
            norm = after;
        }
        record(target);
    }
}

} // namespace

SpectralField perturbed_propagate(const SpectralField& rho0, const PerturbationCoefficient& coeff,
                                  double t, double dt) {
    if (t < 0.0) throw ConfigError("perturbed_propagate: t must be >= 0");
    if (!(dt > 0.0)) throw ConfigError("perturbed_propagate: dt must be > 0");
    check_preconditions(rho0, coeff, t);
    SpectralField rho = rho0;
    PerturbedStepper stepper(rho0.grid(), coeff);
    march(stepper, rho, effective_step(dt, coeff.delta), {t}, [](double) {});
    return rho;
}

PerturbedScan perturbed_scan(const SpectralField& rho0, const PerturbationCoefficient& coeff,
                             double t_end, double dt, const std::vector<double>& record_times,
                             const std::vector<double>& s_list) {
    if (!(t_end >= 0.0)) throw ConfigError("perturbed_scan: t_end must be >= 0");
    if (!(dt > 0.0)) throw ConfigError("perturbed_scan: dt must be > 0");
    for (std::size_t i = 0; i < record_times.size(); ++i) {
        if (record_times[i] < 0.0 || record_times[i] > t_end)
            throw ConfigError("perturbed_scan: record times must lie in [0, t_end]");
        if (i > 0 && record_times[i] <= record_times[i - 1])
            throw ConfigError("perturbed_scan: record times must be strictly ascending");
    }
    check_preconditions(rho0, coeff, t_end);

    PerturbedScan scan;
    scan.s_list = s_list;
    SpectralField rho = rho0;
    PerturbedStepper stepper(rho0.grid(), coeff);
    march(stepper, rho, effective_step(dt, coeff.delta), record_times, [&](double t) {
        PerturbedRecord rec;
        rec.t = t;
        rec.norms.reserve(s_list.size());
        for (double s : s_list) rec.norms.push_back(sobolev_norm(rho, s));
        rec.mean_abs = std::abs(mean_value(rho));
        rec.l2 = rho.l2_norm();
        scan.records.push_back(std::move(rec));
    });
    return scan;
}

} // namespace ipm
