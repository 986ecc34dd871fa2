// harness.hpp — Run configuration and the analyze/simulate/sweep commands the
// CLI front end dispatches to. Exit codes: 0 pass, 2 negative verdict,
// 1 operational error (the CLI maps thrown exceptions to 1).

#pragma once

#include "einselect/criteria.hpp"
#include "einselect/models.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>

namespace einselect::harness {

struct SweepSpec {
    std::vector<int> n_list;
    int seeds_per_n{5};
};

struct Thresholds {
    double vanish{0.1};
    double time_avg{0.05};
    double stability{1e-8};
    double separability{1e-10};
    double nondemolition{1e-9};
};

struct RunConfig {
    models::ModelSpec model;
    TimeGrid times{200.0, 2000};
    std::optional<SweepSpec> sweep;
    Thresholds thresholds;
    std::filesystem::path output_dir{"out"};
    int jobs{0};           // 0 -> hardware concurrency
    int stability_n{3};    // environment size for the dense condition-(d) check
    int stability_seeds{5};
    int nondem_grid{8};    // times sampled for the condition-(B) check
    Eigen::Index dense_cap{4096};

    static RunConfig from_json(const nlohmann::json& j);
    static RunConfig from_file(const std::filesystem::path& path);

    criteria::CriteriaConfig criteria_config() const;
    analysis::AnalysisConfig analysis_config() const;
};

// exit codes
inline constexpr int kExitPass = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitFail = 2;

// Writes report.json with the separability/nondemolition verdicts.
int cmd_analyze(const RunConfig& config);

// Writes z_<m>_<m'>.csv trajectories plus a report with the condition-(b)
// result for the single run.
int cmd_simulate(const RunConfig& config);

// Runs the N x seed sweep, writes scaling.csv and the full criteria report.
int cmd_sweep(const RunConfig& config);

// Trajectory CSV body: t, re_z, im_z, abs_z, purity.
void write_trajectory_csv(const std::filesystem::path& path,
                          const std::vector<double>& t, const dynamics::ZSeries& z,
                          const std::vector<double>& purity);

} // namespace einselect::harness
