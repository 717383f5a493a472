#pragma once

#include "ipmlab/solver.hpp"
#include "ipmlab/whole_space.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ipm {

inline constexpr const char* kToolVersion = "ipmlab 1.0.0";

enum class ExperimentKind {
    Simulate2d,
    Simulate3d,
    LinearTorus,
    LinearWholeSpace,
    PerturbedLinear,
    Sharpness,
    VerifyLemmas,
    StabilityForms,
    Fit,
};

const std::vector<std::string>& experiment_kind_names();
std::string kind_name(ExperimentKind kind);
ExperimentKind kind_from_name(const std::string& name); // ConfigError on unknown

// Optional pass/fail bounds evaluated over a simulation's diagnostics series.
// Unset bounds are not checked. Ratios compare against the first record.
struct SimAsserts {
    std::optional<double> h_max; // max over records of |rho|_{H^{h_max_s}}
    double h_max_s = 4.0;        // must be listed in s_list
    std::optional<double> u_decay_max;      // final u_l2 / initial u_l2
    std::optional<double> u_growth_min;     // max u_l2 / initial u_l2
    std::optional<double> uvert_ratio_max;  // final uvert_h1 / initial
    std::optional<double> dx_ratio_max;     // final dx_rho_l2 / initial
    std::optional<double> tilde_change_max; // |tilde_hm(T)/tilde_hm(0) - 1|
    std::optional<double> mean_tol;         // |mean(t) - mean(0)| every record
    std::optional<double> bar_fit_max;      // fitted bar_hm exponent upper bound
    double fit_t_min = 0.0, fit_t_max = 0.0;
};

struct TorusBlock {
    int n = 64;
    int dimension = 2;
    std::vector<ModeSeed> modes; // required
    std::vector<double> times{0.1, 1.0, 10.0};
    bool run_solver = true; // also march the nonlinearity-disabled solver
    double solver_dt = 0.05;
    double solver_t_end = 10.0;
    double tol_propagator = 1e-12;
    double tol_solver = 1e-10;
};

struct WholeSpaceBlock {
    std::vector<AngularWeight> weights{AngularWeight::Identity, AngularWeight::R1,
                                       AngularWeight::R1Squared};
    double lambda_j = 0.0; // used by the lambda weight
    double width = 1.0;    // radial Gaussian exp(-r^2/(2 width^2))
    double r_max = 12.0;
    int n_r = 64;
    int n_theta = 16;
    double t_min = 100.0, t_max = 1e5;
    int count = 25;
    double fit_t_min = 100.0, fit_t_max = 1e5;
};

struct PerturbedBlock {
    int n = 128;
    double amplitude = 0.05; // G(y, t) = amplitude * sin(frequency * y)
    int frequency = 1;
    double delta = 0.05;
    int sobolev_order = 11;
    double dt = 0.5;
    double t_min = 10.0, t_max = 1000.0;
    int count = 25;
    bool include_zero = true;
    std::vector<double> s_list{0.0, 8.0};
    InitSpec init; // defaults set kind-side: band [1,10], exponent 6, no tilde
    double fit_s = 8.0;
    double fit_t_min = 10.0, fit_t_max = 1000.0;
    std::optional<double> fit_max; // fitted exponent upper bound
    std::optional<double> fit_min; // fitted exponent lower bound
    double mean_tol = 1e-12;
    double monotone_tol = 1e-13; // allowed relative L2 growth per record
};

struct SharpnessBlock {
    std::string family = "concentrated"; // concentrated | radial
    double width = 1.0;                  // radial family Gaussian width
    double t_min = 1.0, t_max = 1e4;
    int count = 60;
    double floor = 0.3;
};

struct LemmasBlock {
    std::vector<double> conv_delta{0.25, 0.5, 1.0, 1.25};
    std::vector<double> conv_eta{0.25, 0.5, 1.0};
    double conv_t_max = 1e6;
    double conv_growth = 10.0; // saturation compares t_max vs growth*t_max
    double conv_tol = 0.02;
    std::vector<std::pair<double, double>> gronwall_cases{{1, 0}, {2, 0}, {10, 0}, {1, 1}};
    double gronwall_t_max = 1e4;
    double gronwall_exact_tol = 1e-8; // A = 0 closed-form agreement
    double gronwall_growth = 10.0;
    double gronwall_tol = 0.02;
    std::vector<int> pointwise_k{1, 2, 3};
    double pointwise_t_max = 1e3;
    double pointwise_growth = 10.0;
    double pointwise_tol = 0.01;
    std::vector<int> angular_k{0, 1, 2};
    double angular_t_min = 100.0, angular_t_max = 1e6;
    int angular_count = 25;
    double angular_exp_tol = 0.02;
    double angular_const_tol = 0.05; // vs 2 Gamma((k+1)/2)
};

struct FormsBlock {
    int n = 64;
    int samples = 100;
    int kmin = 1, kmax = 8;
    double margin_tol = 1e-10; // relative to |g|_{H^1}^2
};

struct FitBlock {
    std::string input; // CSV path, required
    std::string t_column = "t";
    std::string value_column;
    std::string filter_column, filter_value; // optional row filter, set together
    double t_min = 0.0, t_max = 0.0;
    std::optional<double> target;
    double tol = 0.03;
};

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::Simulate2d;
    std::string out_dir; // set by the caller before execute
    std::uint64_t seed = 1;
    std::string tolerance_profile = "default"; // default | strict (halves check tolerances)

    SimConfig sim;   // simulate2d / simulate3d
    SimAsserts asserts;
    StratifiedProfile profile; // shared by simulate / torus / forms
    TorusBlock torus;
    WholeSpaceBlock wspace;
    PerturbedBlock perturbed;
    SharpnessBlock sharp;
    LemmasBlock lemmas;
    FormsBlock forms;
    FitBlock fit;
};

// Parses the flat `key = value` document (# comments). Unknown keys, type
// mismatches, and constraint violations raise ConfigError naming the key.
// The document must carry `kind`; when expected_kind is nonempty the two
// must agree.
ExperimentSpec parse_config_text(const std::string& text, const std::string& expected_kind = "");
ExperimentSpec parse_config_file(const std::string& path, const std::string& expected_kind = "");

// Canonical key=value echo of the resolved spec (defaults filled, 17
// significant digits). The hash covers everything except out_dir and
// tolerance_profile and guards checkpoint resumption.
std::map<std::string, std::string> canonical_echo(const ExperimentSpec& spec);
std::uint64_t spec_hash(const ExperimentSpec& spec);

std::string sha256_hex(const void* data, std::size_t bytes);
std::string sha256_file(const std::string& path); // ConfigError if unreadable

struct ManifestFile {
    std::string name; // relative to the run directory
    std::string sha256;
    std::uint64_t bytes = 0;
};

struct RunManifest {
    std::string kind;
    std::string tool_version;
    std::string started_at, finished_at; // ISO 8601 UTC
    std::string termination;             // completed | blow-up | error: ...
    bool pass = true;
    std::vector<std::string> failures;
    std::map<std::string, std::string> spec_echo;
    std::vector<ManifestFile> files;
    std::string to_json() const;
};

// Runs one experiment into spec.out_dir: kind-specific CSV/JSON artifacts,
// checkpoints for simulation kinds, manifest.json written last with every
// emitted file digested. A nonempty resume_path (simulation kinds only)
// continues from that checkpoint after verifying its recorded spec hash.
// Declared-tolerance failures land in the manifest as pass = false, not as
// exceptions; numeric errors are recorded in the manifest and rethrown.
RunManifest execute(const ExperimentSpec& spec, const std::string& resume_path = "");

struct ReportSummary {
    bool pass = true;
    std::string json;
    std::string markdown;
};

// Verifies the directory's manifest digests (IntegrityError on any mismatch)
// and consolidates fitted exponents against their recorded targets into
// report.json / report.md inside the same directory.
ReportSummary report(const std::string& run_dir);

// CLI exit policy: 0 pass, 1 tolerance failure, 2 configuration or integrity
// error, 3 numeric error or blow-up.
int exit_code_for(const std::exception& e);

} // namespace ipm
