#include "ipmlab/solver.hpp"

#include "ipmlab/errors.hpp"
#include "ipmlab/fft.hpp"
#include "ipmlab/multiplier.hpp"
#include "ipmlab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace ipm {

namespace {

int band_limit(const SimConfig& c) {
    return c.dealias == Dealias::TwoThirds ? c.n / 3 : c.n / 2 - 1;
}

bool is_tilde_mode(int dim, int k1, int k2) {
    return dim == 2 ? k1 == 0 : (k1 == 0 && k2 == 0);
}

std::vector<SpectralField> velocity(const SpectralField& rho) {
    std::vector<SpectralField> u;
    if (rho.grid().dimension() == 2) {
        auto [u1, u2] = velocity_from_density_2d(rho);
        u.push_back(std::move(u1));
        u.push_back(std::move(u2));
    } else {
        auto uu = velocity_from_density_3d(rho);
        for (auto& f : uu) u.push_back(std::move(f));
    }
    return u;
}

// Forms the explicitly treated part of the right-hand side,
//   -(u . grad rho) - omega'(y) u_vert,
// with products in physical space, the configured dealias truncation, and
// the mean mode zeroed. The K-linear damping is NOT included here; the
// stepper integrates it exactly through its multiplier.
class RhsEngine {
public:
    RhsEngine(const Grid& g, const StratifiedProfile& profile, Dealias dealias, bool nonlinearity)
        : grid_(g), fft_(g), nonlinearity_(nonlinearity) {
        const int dim = g.dimension();
        const int n = g.n();
        waves_.resize(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) waves_[i] = g.wavevector(i);
        vel_.assign(std::size_t(dim), std::vector<double>(g.size(), 0.0));
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto& k = waves_[i];
            const double k2 = double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2];
            if (k2 == 0.0) continue;
            if (dim == 2) {
                vel_[0][i] = -double(k[0]) * k[1] / k2;
                vel_[1][i] = double(k[0]) * k[0] / k2;
            } else {
                vel_[0][i] = -double(k[0]) * k[2] / k2;
                vel_[1][i] = -double(k[1]) * k[2] / k2;
                vel_[2][i] = (double(k[0]) * k[0] + double(k[1]) * k[1]) / k2;
            }
        }
        if (dealias == Dealias::TwoThirds) {
            const int kc = n / 3;
            mask_.assign(g.size(), 0);
            for (std::size_t i = 0; i < g.size(); ++i) {
                const auto& k = waves_[i];
                if (std::abs(k[0]) > kc || std::abs(k[1]) > kc ||
                    (dim == 3 && std::abs(k[2]) > kc))
                    mask_[i] = 1;
            }
        }
        omega_prime_.assign(std::size_t(n), 0.0);
        for (int i = 0; i < n; ++i) {
            omega_prime_[std::size_t(i)] = profile.omega_derivative(1, -kPi + kTwoPi * i / n);
            if (omega_prime_[std::size_t(i)] != 0.0) has_omega_ = true;
        }
        uphys_.assign(std::size_t(dim), std::vector<double>(g.size(), 0.0));
        phys_.resize(g.size());
        accum_.resize(g.size());
        spec_ = SpectralField(g);
    }

    void nonlinear(const SpectralField& rho, SpectralField& out, double& umax) {
        const int dim = grid_.dimension();
        for (int a = 0; a < dim; ++a) {
            for (std::size_t i = 0; i < rho.size(); ++i)
                spec_[i] = vel_[std::size_t(a)][i] * rho[i];
            fft_.inverse(spec_, uphys_[std::size_t(a)].data());
        }
        double umax2 = 0.0;
        for (std::size_t j = 0; j < accum_.size(); ++j) {
            double s = 0.0;
            for (int a = 0; a < dim; ++a) s += uphys_[std::size_t(a)][j] * uphys_[std::size_t(a)][j];
            umax2 = std::max(umax2, s);
        }
        umax = std::sqrt(umax2);

        std::fill(accum_.begin(), accum_.end(), 0.0);
        if (nonlinearity_) {
            for (int a = 0; a < dim; ++a) {
                for (std::size_t i = 0; i < rho.size(); ++i)
                    spec_[i] = cdouble(0.0, double(waves_[i][std::size_t(a)])) * rho[i];
                fft_.inverse(spec_, phys_.data());
                for (std::size_t j = 0; j < accum_.size(); ++j)
                    accum_[j] += uphys_[std::size_t(a)][j] * phys_[j];
            }
        }
        if (has_omega_) {
            const std::size_t n = std::size_t(grid_.n());
            const auto& uv = uphys_[std::size_t(dim - 1)];
            for (std::size_t j = 0; j < accum_.size(); ++j)
                accum_[j] += omega_prime_[j % n] * uv[j];
        }
        for (std::size_t j = 0; j < accum_.size(); ++j) accum_[j] = -accum_[j];
        fft_.forward(accum_.data(), out);
        if (!mask_.empty())
            for (std::size_t i = 0; i < out.size(); ++i)
                if (mask_[i]) out[i] = 0.0;
        out[0] = 0.0;
        if (!out.all_finite()) throw BlowUpError(rho.max_abs());
    }

    const Grid& grid() const { return grid_; }

private:
    Grid grid_;
    Fft fft_;
    bool nonlinearity_;
    bool has_omega_ = false;
    std::vector<std::array<int, 3>> waves_;
    std::vector<std::vector<double>> vel_;
    std::vector<char> mask_;
    std::vector<double> omega_prime_;
    std::vector<std::vector<double>> uphys_;
    std::vector<double> phys_;
    std::vector<double> accum_;
    SpectralField spec_;
};

} // namespace

void validate(const SimConfig& c) {
    if (c.dimension != 2 && c.dimension != 3)
        throw ConfigError("config: dimension must be 2 or 3");
    if (c.n < 8 || !is_power_of_two(c.n))
        throw ConfigError("config: N must be a power of two >= 8");
    if (!(c.t_end > 0.0)) throw ConfigError("config: t_end must be > 0");
    if (!(c.safety > 0.0) || c.safety > 1.0)
        throw ConfigError("config: safety factor must be in (0, 1]");
    if (c.dt_policy == DtPolicy::Fixed && !(c.dt_value > 0.0))
        throw ConfigError("config: fixed dt must be > 0");
    if (!(c.diag_stride > 0.0)) throw ConfigError("config: diagnostic stride must be > 0");
    if (c.checkpoint_stride < 0.0) throw ConfigError("config: checkpoint stride must be >= 0");
    if (!(c.s_energy >= 4.0)) throw ConfigError("config: s_energy must be >= 4");
    if (c.s_split < 0.0) throw ConfigError("config: s_split must be >= 0");
    for (double s : c.s_list)
        if (s < 0.0 || !std::isfinite(s)) throw ConfigError("config: s_list entries must be >= 0");
    const int limit = band_limit(c);
    if (c.init.kind == InitSpec::Kind::RandomBand) {
        if (!(c.init.epsilon >= 0.0) || !std::isfinite(c.init.epsilon))
            throw ConfigError("config: epsilon must be >= 0");
        if (c.init.normalize_s < 0.0) throw ConfigError("config: normalize_s must be >= 0");
        if (c.init.kmin < 1 || c.init.kmax < c.init.kmin)
            throw ConfigError("config: need 1 <= kmin <= kmax");
        if (c.init.kmax > limit)
            throw ConfigError("config: kmax " + std::to_string(c.init.kmax) +
                              " exceeds the resolvable band " + std::to_string(limit));
    } else {
        if (c.init.modes.empty())
            throw ConfigError("config: explicit init needs at least one mode");
        for (const auto& m : c.init.modes) {
            if (std::abs(m.k1) > limit || std::abs(m.k2) > limit || std::abs(m.k3) > limit)
                throw ConfigError("config: seeded mode outside the resolvable band");
            if (c.dimension == 2 && m.k3 != 0)
                throw ConfigError("config: 2D mode seeds must have k3 = 0");
            if (!std::isfinite(m.amplitude) || !std::isfinite(m.phase))
                throw ConfigError("config: non-finite mode seed");
        }
    }
}

SpectralField initial_field(const SimConfig& config) {
    validate(config);
    const Grid g(config.dimension, config.n);
    SpectralField f(g);
    const double norm_factor = std::pow(kTwoPi, 0.5 * config.dimension);

    if (config.init.kind == InitSpec::Kind::Modes) {
        for (const auto& m : config.init.modes) {
            // amplitude * cos(k.x + phase); for k = 0 the two half-weights
            // coincide and correctly sum to amplitude * cos(phase).
            const cdouble half = 0.5 * m.amplitude * std::polar(1.0, m.phase) * norm_factor;
            f.at(m.k1, m.k2, m.k3) += half;
            f.at(-m.k1, -m.k2, -m.k3) += std::conj(half);
        }
        return f;
    }

    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int b = config.init.kmax;
    const double lo2 = double(config.init.kmin) * config.init.kmin;
    const double hi2 = double(config.init.kmax) * config.init.kmax;
    const int b3 = config.dimension == 3 ? b : 0;
    // One representative per conjugate pair, in a fixed lexicographic order;
    // draws are consumed only for modes actually seeded.
    for (int k1 = 0; k1 <= b; ++k1) {
        for (int k2 = (k1 == 0 ? 0 : -b); k2 <= b; ++k2) {
            for (int k3 = ((k1 == 0 && k2 == 0) ? 0 : -b3); k3 <= b3; ++k3) {
                if (k1 == 0 && k2 == 0 && k3 == 0) continue;
                const double n2 = double(k1) * k1 + double(k2) * k2 + double(k3) * k3;
                if (n2 < lo2 || n2 > hi2) continue;
                if (config.init.exclude_tilde && is_tilde_mode(config.dimension, k1, k2)) continue;
                const double mag = std::sqrt(unit(rng));
                const double phase = kTwoPi * unit(rng);
                const cdouble c = mag *
                                  std::pow(1.0 + std::sqrt(n2), -config.init.spectrum_exponent) *
                                  std::polar(1.0, phase);
                f.at(k1, k2, k3) = c;
                f.at(-k1, -k2, -k3) = std::conj(c);
            }
        }
    }
    const double h = sobolev_norm(f, config.init.normalize_s);
    if (h > 0.0)
        f *= config.init.epsilon / h;
    else if (config.init.epsilon > 0.0)
        throw ConfigError("config: the random band selected no modes");
    return f;
}

SpectralField rhs(const SpectralField& rho, const StratifiedProfile& profile, Dealias dealias) {
    RhsEngine engine(rho.grid(), profile, dealias, true);
    SpectralField out(rho.grid());
    double umax = 0.0;
    engine.nonlinear(rho, out, umax);
    const int dim = rho.grid().dimension();
    const double kk = profile.K();
    for (std::size_t i = 0; i < out.size(); ++i) {
        auto k = rho.grid().wavevector(i);
        out[i] -= kk * damping_fraction(KVec{k[0], k[1], k[2]}, dim) * rho[i];
    }
    return out;
}

struct Stepper::Impl {
    SimConfig config;
    Grid grid;
    RhsEngine engine;
    double dx;
    double umax = 0.0;
    SpectralField k1, k2, k3, k4, tmp;
    std::vector<double> lambda; // K * damping fraction per mode
    // Exponential tables keyed by exact dt: (e^{-lambda dt/2}, e^{-lambda dt}).
    std::map<double, std::pair<std::vector<double>, std::vector<double>>> exp_cache;

    explicit Impl(const SimConfig& c)
        : config(c), grid(c.dimension, c.n),
          engine(grid, c.profile, c.dealias, c.nonlinearity), dx(grid.spacing()), k1(grid),
          k2(grid), k3(grid), k4(grid), tmp(grid), lambda(grid.size(), 0.0) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            auto kv = grid.wavevector(i);
            lambda[i] = c.profile.K() * damping_fraction(KVec{kv[0], kv[1], kv[2]}, c.dimension);
        }
    }

    const std::pair<std::vector<double>, std::vector<double>>& tables(double dt) {
        auto it = exp_cache.find(dt);
        if (it != exp_cache.end()) return it->second;
        if (exp_cache.size() > 16) exp_cache.clear();
        std::vector<double> half(lambda.size()), full(lambda.size());
        for (std::size_t i = 0; i < lambda.size(); ++i) {
            half[i] = std::exp(-0.5 * dt * lambda[i]);
            full[i] = half[i] * half[i];
        }
        return exp_cache.emplace(dt, std::make_pair(std::move(half), std::move(full)))
            .first->second;
    }

    void prepare(const SimState& s) { engine.nonlinear(s.rho, k1, umax); }

    void check_cfl(double dt) const {
        const double ratio = std::abs(dt) * umax / dx;
        if (ratio > 1.0) throw CflError(ratio, std::abs(dt));
    }

    // Integrating-factor RK4; stage 1 (k1) must already be prepared.
    void finish(SimState& s, double dt) {
        const auto& [eh, ef] = tables(dt);
        SpectralField& rho = s.rho;
        double scratch = 0.0;
        for (std::size_t i = 0; i < rho.size(); ++i)
            tmp[i] = eh[i] * (rho[i] + 0.5 * dt * k1[i]);
        engine.nonlinear(tmp, k2, scratch);
        for (std::size_t i = 0; i < rho.size(); ++i)
            tmp[i] = eh[i] * rho[i] + 0.5 * dt * k2[i];
        engine.nonlinear(tmp, k3, scratch);
        for (std::size_t i = 0; i < rho.size(); ++i)
            tmp[i] = ef[i] * rho[i] + dt * eh[i] * k3[i];
        engine.nonlinear(tmp, k4, scratch);
        const double w = dt / 6.0;
        for (std::size_t i = 0; i < rho.size(); ++i)
            rho[i] = ef[i] * rho[i] +
                     w * (ef[i] * k1[i] + 2.0 * eh[i] * (k2[i] + k3[i]) + k4[i]);
        s.t += dt;
        s.step += 1;
    }
};

Stepper::Stepper(const SimConfig& config) : impl_(new Impl(config)) { validate(config); }
Stepper::~Stepper() = default;

StepOutcome Stepper::advance(SimState& state, double limit) {
    if (!(limit > 0.0)) throw ConfigError("advance: limit must be > 0");
    impl_->prepare(state);
    const double policy = impl_->config.dt_policy == DtPolicy::Cfl
                              ? impl_->config.safety * impl_->dx / std::max(1.0, impl_->umax)
                              : impl_->config.dt_value;
    StepOutcome out;
    // Snap to the limit when the policy step would leave only slack behind.
    if (policy < limit * (1.0 - 1e-9)) {
        out.dt = policy;
        out.hit_limit = false;
    } else {
        out.dt = limit;
        out.hit_limit = true;
    }
    impl_->check_cfl(out.dt);
    impl_->finish(state, out.dt);
    return out;
}

void Stepper::step_raw(SimState& state, double dt) {
    if (dt == 0.0 || !std::isfinite(dt)) throw ConfigError("step: dt must be finite and nonzero");
    impl_->prepare(state);
    impl_->check_cfl(dt);
    impl_->finish(state, dt);
}

double Stepper::last_umax() const { return impl_->umax; }

namespace {

struct EnergyTerms {
    double term_grad, term_flux, term_neg, c_min;
};

EnergyTerms energy_terms(const SpectralField& rho, const std::vector<SpectralField>& u, double s,
                         double de_dt) {
    const double rho_hs = sobolev_norm(rho, s);
    double u_hs2 = 0.0;
    for (const auto& comp : u) {
        const double ns = sobolev_norm(comp, s);
        u_hs2 += ns * ns;
    }
    EnergyTerms t{};
    t.term_grad = grad_linf(u.back()) * rho_hs * rho_hs;
    t.term_flux = u_hs2 * rho_hs;
    t.term_neg = 0.5 * u_hs2;
    const double denom = t.term_grad + t.term_flux;
    t.c_min = denom > 0.0 ? std::max(0.0, (de_dt + t.term_neg) / denom) : 0.0;
    return t;
}

DiagnosticsRecord diagnostics(const SimState& st, const SimConfig& config, double de_dt) {
    const SpectralField& rho = st.rho;
    DiagnosticsRecord r;
    r.t = st.t;
    r.h.reserve(config.s_list.size());
    for (double s : config.s_list) r.h.push_back(sobolev_norm(rho, s));
    auto [bar, tilde] = bar_tilde_split(rho);
    r.bar_hm = sobolev_norm(bar, config.s_split);
    r.tilde_hm = sobolev_norm(tilde, config.s_split);
    const std::vector<SpectralField> u = velocity(rho);
    r.u1_h3 = sobolev_norm(u[0], 3.0);
    r.u2_h3 = sobolev_norm(u[1], 3.0);
    r.u3_h3 = u.size() == 3 ? sobolev_norm(u[2], 3.0) : 0.0;
    double l22 = 0.0;
    for (const auto& comp : u) {
        const double n = comp.l2_norm();
        l22 += n * n;
    }
    r.u_l2 = std::sqrt(l22);
    r.uvert_h1 = sobolev_norm(u.back(), 1.0);
    r.grad_ub_linf = grad_linf(u.back());
    r.dx_rho_l2 = partial_derivative(rho, 0).l2_norm();
    const cdouble mean = mean_value(rho);
    r.mean_re = mean.real();
    r.mean_im = mean.imag();
    r.de_dt = de_dt;
    const EnergyTerms terms = energy_terms(rho, u, config.s_energy, de_dt);
    r.term_grad = terms.term_grad;
    r.term_flux = terms.term_flux;
    r.term_neg = terms.term_neg;
    r.c_min = terms.c_min;
    r.div_defect = u.size() == 2 ? divergence_defect_2d(u[0], u[1])
                                 : divergence_defect_3d(u[0], u[1], u[2]);
    return r;
}

// Next record/checkpoint/end boundary strictly after t.
struct Boundary {
    double t;
    bool record, checkpoint, end;
};

Boundary next_boundary(double t, const SimConfig& config) {
    const double inf = std::numeric_limits<double>::infinity();
    auto next_multiple = [](double from, double stride) {
        return (std::floor(from / stride + 1e-12) + 1.0) * stride;
    };
    const double r = config.diag_stride > 0.0 ? next_multiple(t, config.diag_stride) : inf;
    const double c = config.checkpoint_stride > 0.0 ? next_multiple(t, config.checkpoint_stride)
                                                    : inf;
    const double b = std::min({r, c, config.t_end});
    auto near = [b](double x) { return std::abs(x - b) <= 1e-9 * std::max(1.0, std::abs(b)); };
    Boundary out{b, near(r), near(c), near(config.t_end)};
    if (out.end) out.record = true; // the final state always gets a record
    return out;
}

RunResult run_impl(const SimConfig& config, const SimState* from, const RunSinks& sinks) {
    validate(config);
    RunResult rr;
    SimState st = from ? *from : SimState{0.0, 0, initial_field(config)};
    if (from && (st.rho.grid().dimension() != config.dimension || st.rho.grid().n() != config.n))
        throw ConfigError("resume: saved state grid does not match the configuration");

    Stepper stepper(config);
    const Grid& g = st.rho.grid();
    std::vector<double> ew(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto k = g.wavevector(i);
        const double k2 = double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2];
        ew[i] = std::pow(1.0 + k2, config.s_energy);
    }
    auto energy = [&](const SpectralField& f) {
        double s = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) s += ew[i] * std::norm(f[i]);
        return s;
    };

    const double blow_limit = 1e8 * std::max(1.0, st.rho.l2_norm());

    auto emit = [&](double de_dt) {
        rr.series.push_back(diagnostics(st, config, de_dt));
        if (sinks.on_record) sinks.on_record(rr.series.back());
        if (sinks.on_state_record) sinks.on_state_record(st);
    };

    if (!from) emit(0.0);

    double de_dt_last = 0.0;
    while (st.t < config.t_end) {
        const Boundary b = next_boundary(st.t, config);
        bool blown = false;
        std::string msg;
        while (st.t < b.t) {
            const double e_before = energy(st.rho);
            StepOutcome out;
            try {
                out = stepper.advance(st, b.t - st.t);
            } catch (const BlowUpError& e) {
                blown = true;
                msg = std::string(e.what()) + " (t = " + std::to_string(st.t) + ")";
                break;
            }
            if (!st.rho.all_finite()) {
                blown = true;
                msg = "non-finite state at t = " + std::to_string(st.t);
                break;
            }
            const double l2 = st.rho.l2_norm();
            if (l2 > blow_limit) {
                blown = true;
                msg = "L2 norm " + std::to_string(l2) + " exceeded 1e8 x initial at t = " +
                      std::to_string(st.t);
                break;
            }
            de_dt_last = (energy(st.rho) - e_before) / out.dt;
            if (out.hit_limit) {
                st.t = b.t;
                break;
            }
        }
        if (blown) {
            rr.termination = Termination::BlowUp;
            rr.message = msg;
            rr.final_state = std::move(st);
            return rr;
        }
        if (st.t >= b.t) {
            if (b.record) emit(de_dt_last);
            if (b.checkpoint && sinks.on_checkpoint) sinks.on_checkpoint(st);
            if (b.end) break;
        }
    }
    rr.termination = Termination::Completed;
    rr.message = "completed";
    rr.final_state = std::move(st);
    return rr;
}

} // namespace

RunResult run(const SimConfig& config, const RunSinks& sinks) {
    return run_impl(config, nullptr, sinks);
}

RunResult run_resumed(const SimConfig& config, const SimState& from, const RunSinks& sinks) {
    return run_impl(config, &from, sinks);
}

EnergyLedger energy_estimate_monitor(const SimState& before, const SimState& after, double s) {
    if (!(s >= 4.0)) throw ConfigError("energy_estimate_monitor: s must be >= 4");
    if (!(after.t > before.t))
        throw ConfigError("energy_estimate_monitor: states must be strictly ordered in time");
    if (!(before.rho.grid() == after.rho.grid()))
        throw ConfigError("energy_estimate_monitor: grids do not match");
    const double e0 = std::pow(sobolev_norm(before.rho, s), 2);
    const double e1 = std::pow(sobolev_norm(after.rho, s), 2);
    EnergyLedger led;
    led.de_dt = (e1 - e0) / (after.t - before.t);
    const std::vector<SpectralField> u = velocity(after.rho);
    const EnergyTerms t = energy_terms(after.rho, u, s, led.de_dt);
    led.term_grad = t.term_grad;
    led.term_flux = t.term_flux;
    led.term_neg = t.term_neg;
    led.c_min = t.c_min;
    return led;
}

} // namespace ipm
