#pragma once

#include "ipmlab/field.hpp"
#include "ipmlab/grid.hpp"
#include "ipmlab/profile.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace ipm {

enum class DtPolicy { Cfl, Fixed };
enum class Dealias { TwoThirds, None };

struct ModeSeed {
    int k1 = 0, k2 = 0, k3 = 0;
    double amplitude = 0.0;
    double phase = 0.0;
};

// Initial perturbation: either a seeded random band with a power-law
// envelope normalized to |rho0|_{H^normalize_s} = epsilon, or explicit
// cosine modes amplitude*cos(k.x + phase).
struct InitSpec {
    enum class Kind { RandomBand, Modes };
    Kind kind = Kind::RandomBand;
    int kmin = 1;
    int kmax = 6;
    double spectrum_exponent = 0.0; // per-mode envelope (1+|k|)^{-exponent}
    bool exclude_tilde = false;     // skip vertical-only modes when seeding
    double epsilon = 1e-3;
    double normalize_s = 4.0;
    std::vector<ModeSeed> modes; // used by Kind::Modes
};

struct SimConfig {
    int dimension = 2;
    int n = 64;
    StratifiedProfile profile;
    InitSpec init;
    DtPolicy dt_policy = DtPolicy::Cfl;
    double dt_value = 0.01; // fixed-policy step
    double safety = 0.5;    // CFL fraction, in (0, 1]
    double t_end = 1.0;
    double diag_stride = 0.1;
    double checkpoint_stride = 0.0; // 0 disables checkpoints
    Dealias dealias = Dealias::TwoThirds;
    bool nonlinearity = true;
    std::vector<double> s_list{0.0, 3.0, 4.0, 5.0, 10.0};
    double s_split = 4.0;  // order for the bar/tilde norms
    double s_energy = 4.0; // order for the energy ledger (>= 4)
    std::uint64_t seed = 1;
};

// Throws ConfigError on any violated invariant (epsilon >= 0, t_end > 0,
// N a power of two >= 8, safety in (0, 1], seeded band inside the dealias
// box, ...).
void validate(const SimConfig& config);

struct SimState {
    double t = 0.0;
    std::uint64_t step = 0;
    SpectralField rho;
};

struct DiagnosticsRecord {
    double t = 0.0;
    std::vector<double> h; // |rho|_{H^s}, parallel to s_list
    double bar_hm = 0.0;   // |bar rho|_{H^{s_split}}
    double tilde_hm = 0.0; // |tilde rho|_{H^{s_split}}
    double u1_h3 = 0.0, u2_h3 = 0.0, u3_h3 = 0.0;
    double u_l2 = 0.0;          // full velocity L2 norm
    double uvert_h1 = 0.0;      // vertical component H1 norm
    double grad_ub_linf = 0.0;  // |grad u_vert|_{L^inf}
    double dx_rho_l2 = 0.0;     // |d/dx rho|_{L2} (anisotropic decay witness)
    double mean_re = 0.0, mean_im = 0.0;
    // Energy ledger at s_energy: de_dt is the finite difference of
    // |rho|^2_{H^s} across the step landing on this record (0 on the first
    // record), the terms are evaluated at this record's state, and c_min is
    // the smallest constant closing the inequality
    //   de_dt <= c (term_grad + term_flux) - term_neg.
    double de_dt = 0.0;
    double term_grad = 0.0, term_flux = 0.0, term_neg = 0.0;
    double c_min = 0.0;
    double div_defect = 0.0;
};

enum class Termination { Completed, BlowUp };

struct RunResult {
    std::vector<DiagnosticsRecord> series;
    SimState final_state;
    Termination termination = Termination::Completed;
    std::string message;
};

// Optional streaming callbacks; a null function is skipped. on_checkpoint
// fires at checkpoint-stride boundaries, on_state_record at every
// diagnostics record (diagnostics themselves also land in the result).
struct RunSinks {
    std::function<void(const DiagnosticsRecord&)> on_record;
    std::function<void(const SimState&)> on_checkpoint;
    std::function<void(const SimState&)> on_state_record;
};

// Deterministic seeded initial data per the config's InitSpec.
SpectralField initial_field(const SimConfig& config);

// Full right-hand side d/dt rho = -u . grad rho - Omega'(y) u_vert, products
// formed in physical space, dealiased per the rule, mean mode zeroed.
// Expects dealiased input. Throws BlowUpError if the result is non-finite.
SpectralField rhs(const SpectralField& rho, const StratifiedProfile& profile,
                  Dealias dealias = Dealias::TwoThirds);

struct StepOutcome {
    double dt = 0.0;
    bool hit_limit = false; // the step landed exactly on the requested limit
};

// Integrating-factor classical RK4 around the exact multiplier of the
// K-linear part; the remaining terms (advection and the omega' coupling)
// are treated explicitly. Holds plans and exponential tables; one instance
// per run, not safe for concurrent use.
class Stepper {
public:
    explicit Stepper(const SimConfig& config);
    ~Stepper();
    Stepper(const Stepper&) = delete;
    Stepper& operator=(const Stepper&) = delete;

    // Advances by min(policy dt, limit). For the CFL policy the step obeys
    // safety * dx / max(1, max|u|) with the velocity of the current state.
    StepOutcome advance(SimState& state, double limit);

    // Fixed-size step (any nonzero dt; negative steps support reversal
    // audits). Throws CflError without touching the state if
    // |dt| max|u| / dx > 1.
    void step_raw(SimState& state, double dt);

    // max|u| of the last prepared state (diagnostic).
    double last_umax() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

RunResult run(const SimConfig& config, const RunSinks& sinks = {});

// Continues a run from a saved state: the boundary schedule is derived from
// absolute time, so the concatenation of the original and resumed series is
// bit-identical to an uninterrupted run. No record is emitted at the resume
// point itself (the original run already owns it).
RunResult run_resumed(const SimConfig& config, const SimState& from, const RunSinks& sinks = {});

struct EnergyLedger {
    double de_dt = 0.0;
    double term_grad = 0.0, term_flux = 0.0, term_neg = 0.0;
    double c_min = 0.0;
};

// Finite-difference energy inequality audit across one step (s >= 4).
EnergyLedger energy_estimate_monitor(const SimState& before, const SimState& after, double s);

} // namespace ipm
