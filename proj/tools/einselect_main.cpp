// einselect — analyze, simulate, and sweep front end.
//
//   einselect analyze  --config run.json
//   einselect simulate --config run.json
//   einselect sweep    --config run.json [--jobs K]
//
// EINSELECT_SEED overrides the configured seed. Exit codes: 0 pass,
// 2 negative verdict, 1 operational error.

#include "einselect/harness.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>

namespace {

einselect::harness::RunConfig load_config(const std::string& path, int jobs) {
    auto config = einselect::harness::RunConfig::from_file(path);
    if (const char* env_seed = std::getenv("EINSELECT_SEED")) {
        try {
            config.model.seed = std::stoull(env_seed);
        } catch (const std::exception&) {
            throw std::runtime_error("EINSELECT_SEED: not a valid unsigned integer: " +
                                     std::string(env_seed));
        }
    }
    if (jobs > 0) config.jobs = jobs;
    return config;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"einselect — pointer-basis analysis and decoherence criteria"};
    app.require_subcommand(1);

    std::string config_path;
    int jobs = 0;

    auto* analyze = app.add_subcommand("analyze", "separability and nondemolition verdicts");
    analyze->add_option("--config", config_path, "run configuration JSON")->required();

    auto* simulate = app.add_subcommand("simulate", "trajectories and the time-average check");
    simulate->add_option("--config", config_path, "run configuration JSON")->required();

    auto* sweep = app.add_subcommand("sweep", "N x seed sweep with the full criteria report");
    sweep->add_option("--config", config_path, "run configuration JSON")->required();
    sweep->add_option("--jobs", jobs, "worker threads (default: available parallelism)");

    CLI11_PARSE(app, argc, argv);

    try {
        const auto config = load_config(config_path, jobs);
        if (analyze->parsed()) return einselect::harness::cmd_analyze(config);
        if (simulate->parsed()) return einselect::harness::cmd_simulate(config);
        return einselect::harness::cmd_sweep(config);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return einselect::harness::kExitError;
    }
}
