// Command line front end: one subcommand per experiment kind, plus `report`,
// which re-verifies a finished run directory against its manifest.
#include "ipmlab/errors.hpp"
#include "ipmlab/experiment.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

namespace {

struct KindArgs {
    std::string config;
    std::string out;
    std::string resume;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> tolerance_profile;
};

int run_kind(const std::string& kind, const KindArgs& args) {
    ipm::ExperimentSpec spec = ipm::parse_config_file(args.config, kind);
    spec.out_dir = args.out;
    if (args.seed) spec.seed = *args.seed;
    if (args.tolerance_profile) spec.tolerance_profile = *args.tolerance_profile;
    const ipm::RunManifest man = ipm::execute(spec, args.resume);
    if (man.termination == "blow-up") {
        std::cerr << "run terminated by blow-up; see " << args.out << "/summary.json\n";
        return 3;
    }
    if (!man.pass) {
        for (const std::string& f : man.failures) std::cerr << "check failed: " << f << "\n";
        return 1;
    }
    std::cout << "ok: " << args.out << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pseudo-spectral laboratory for stratified porous media flow"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(ipm::kToolVersion));

    std::vector<std::pair<CLI::App*, KindArgs>> kinds;
    kinds.reserve(ipm::experiment_kind_names().size());
    for (const std::string& name : ipm::experiment_kind_names()) {
        CLI::App* sub = app.add_subcommand(name, "Run a " + name + " experiment");
        kinds.emplace_back(sub, KindArgs{});
        KindArgs& ka = kinds.back().second;
        sub->add_option("--config", ka.config, "Path to the key = value config file")
            ->required();
        sub->add_option("--out", ka.out, "Output directory for run artifacts")->required();
        sub->add_option("--seed", ka.seed, "Override the config's seed");
        sub->add_option("--tolerance-profile", ka.tolerance_profile,
                        "Tolerance profile (default|strict)")
            ->check(CLI::IsMember({"default", "strict"}));
        if (name == "simulate2d" || name == "simulate3d")
            sub->add_option("--resume", ka.resume, "Checkpoint file to resume from");
    }

    std::string report_dir;
    CLI::App* rep = app.add_subcommand("report", "Verify a run directory and summarize it");
    rep->add_option("dir", report_dir, "Run directory containing manifest.json")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (rep->parsed()) {
            const ipm::ReportSummary rs = ipm::report(report_dir);
            std::cout << rs.markdown;
            return rs.pass ? 0 : 1;
        }
        for (std::size_t i = 0; i < kinds.size(); ++i)
            if (kinds[i].first->parsed())
                return run_kind(ipm::experiment_kind_names()[i], kinds[i].second);
        std::cerr << "no subcommand selected\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ipm::exit_code_for(e);
    }
}
