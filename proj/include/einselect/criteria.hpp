// criteria.hpp — Statistical estimators for the defining conditions (a)-(d)
// and the overall rule verdict. Estimators operate on sampled z series; the
// stationary window [t_max/2, t_max] drops the initial transient.

#pragma once

#include "einselect/analysis.hpp"
#include "einselect/composite.hpp"
#include "einselect/dynamics.hpp"

#include <json.hpp>

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace einselect::criteria {

using dynamics::ZSeries;

struct CriteriaConfig {
    double vanish_threshold = 0.1;   // condition (a): largest-N stationary mean
    double timeavg_threshold = 0.05; // condition (b): final running average
    double stability_tol = 1e-8;     // condition (d): fidelity >= 1 - tol
    double monotone_rel_tol = 0.05;  // slack for per-step monotonicity checks
};

// Trapezoid-weighted mean of |z| over the given window.
double window_mean_abs(std::span<const Complex> z, std::span<const double> t);

// Delta z = sqrt(time-mean of |z - <z>_window|^2), trapezoid-weighted.
double estimate_deviation(std::span<const Complex> z, std::span<const double> t);

// Stationary-window statistics of a full series on its grid.
double stationary_mean_abs(const ZSeries& z, const TimeGrid& grid);
double stationary_deviation(const ZSeries& z, const TimeGrid& grid);

struct VanishingResult {
    std::vector<int> n_values;
    std::vector<double> means; // stationary mean |z| per N
    double threshold{0.0};
    bool monotone_ok{false};
    bool threshold_ok{false};
    bool single_n{false}; // monotonicity clause vacuous for a single N
    bool pass{false};
};

// Condition (a) surrogate: per-N stationary means non-increasing (5% relative
// slack) and the largest-N mean below threshold. Requires >= 3 N values.
VanishingResult check_vanishing(const std::vector<int>& n_values,
                                const std::function<ZSeries(int)>& family,
                                const TimeGrid& grid, const CriteriaConfig& cfg = {});

// Same rule on precomputed per-N means (used by sweep drivers).
VanishingResult vanishing_from_means(const std::vector<int>& n_values,
                                     const std::vector<double>& means,
                                     const CriteriaConfig& cfg, bool allow_single_n);

struct TimeAverageResult {
    std::vector<double> running_abs; // |<z>_T| at each grid point
    double final_abs{0.0};
    double threshold{0.0};
    bool envelope_decreasing{false};
    bool pass{false};
};

// Condition (b): running average <z>_T by trapezoid rule; pass iff the final
// magnitude is below threshold and the envelope falls over the last half.
TimeAverageResult check_time_average(const ZSeries& z, const TimeGrid& grid,
                                     const CriteriaConfig& cfg = {});

struct FitResult {
    double slope{0.0}; // p for the power law, r for the exponential law
    double intercept{0.0};
    double r2{0.0};
};

struct ScalingPoint {
    int n{0};
    int seed_index{0};
    double delta_z{0.0};
    double mean_abs_z{0.0};
};

struct ScalingResult {
    std::vector<int> n_values;
    std::vector<double> delta_avg; // seed-averaged Delta z per N
    bool no_fluctuation{false};
    FitResult power_fit; // log dz = a - p log N
    FitResult exp_fit;   // log dz = a - r N
    bool pass{false};
};

// Condition (c) surrogate: seed-averaged Delta z strictly decreasing in N;
// both candidate laws are fitted and reported, neither is asserted.
// Requires >= 4 distinct N and >= 5 seeds per N.
ScalingResult check_deviation_scaling(const std::vector<ScalingPoint>& table,
                                      const CriteriaConfig& cfg = {});

struct StabilityResult {
    double min_fidelity{1.0};
    std::vector<std::pair<int, double>> min_per_label; // pointer label -> min F
    double threshold{0.0};                             // 1 - stability_tol
    bool pass{false};
};

// Condition (d): evolve |m> (x) |chi> densely for each rank-1 pointer state
// and environment sample; F_m(t) = <m| rho_S(t) |m> must stay >= 1 - tol.
StabilityResult check_pointer_stability(const CompositeSystem& model,
                                        const std::vector<std::pair<int, StateVector>>& pointer_states,
                                        const std::vector<StateVector>& env_states,
                                        const TimeGrid& grid,
                                        const CriteriaConfig& cfg = {},
                                        const dynamics::DynamicsConfig& dyn = {});

enum class R1Verdict { eisr_candidate, no_pointer_basis, criteria_failed };

const char* to_string(R1Verdict v);

struct CriteriaReport {
    bool cond_A_separable{false};
    int schmidt_rank{0};
    std::vector<double> weights;
    bool cond_B_pass{false};
    double max_commutator_norm{0.0};
    std::optional<VanishingResult> cond_a;
    std::optional<TimeAverageResult> cond_b;
    std::optional<ScalingResult> cond_c;
    std::optional<StabilityResult> cond_d;
    std::vector<std::string> flags;
    R1Verdict verdict{R1Verdict::no_pointer_basis};
};

// Overall verdict: no_pointer_basis when (A) or (B) fails; criteria_failed
// when the structure holds but any evaluated condition (a)-(d) fails;
// otherwise the model is an EISR candidate (the conditions are necessary,
// never sufficient).
R1Verdict verdict_r1(const CriteriaReport& report);

nlohmann::json report_json(const CriteriaReport& report,
                           const std::vector<ScalingPoint>& table = {});

} // namespace einselect::criteria
