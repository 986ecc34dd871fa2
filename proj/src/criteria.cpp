#include "einselect/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace einselect::criteria {

namespace {

std::vector<double> trapezoid_weights(std::size_t n, double dt) {
    std::vector<double> w(n, dt);
    if (n < 2) throw std::invalid_argument("trapezoid weights: need >= 2 samples");
    w.front() = 0.5 * dt;
    w.back() = 0.5 * dt;
    return w;
}

// least squares y = a + b x
FitResult linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    FitResult fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss_res = 0.0, ss_tot = 0.0;
    const double mean_y = sy / n;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double pred = fit.intercept + fit.slope * x[i];
        ss_res += (y[i] - pred) * (y[i] - pred);
        ss_tot += (y[i] - mean_y) * (y[i] - mean_y);
    }
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

} // namespace

double window_mean_abs(std::span<const Complex> z, std::span<const double> t) {
    if (z.empty() || z.size() != t.size())
        throw std::invalid_argument("window_mean_abs: empty or mismatched window");
    if (z.size() == 1) return std::abs(z[0]);
    const auto w = trapezoid_weights(z.size(), t[1] - t[0]);
    double total = 0.0, acc = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        acc += w[i] * std::abs(z[i]);
        total += w[i];
    }
    return acc / total;
}

double estimate_deviation(std::span<const Complex> z, std::span<const double> t) {
    if (z.empty() || z.size() != t.size())
        throw std::invalid_argument("estimate_deviation: empty or mismatched window");
    if (z.size() == 1) return 0.0;
    const auto w = trapezoid_weights(z.size(), t[1] - t[0]);
    double total = 0.0;
    Complex mean(0.0, 0.0);
    for (std::size_t i = 0; i < z.size(); ++i) {
        mean += w[i] * z[i];
        total += w[i];
    }
    mean /= total;
    double var = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) var += w[i] * std::norm(z[i] - mean);
    return std::sqrt(var / total);
}

namespace {

std::pair<std::span<const Complex>, std::span<const double>>
stationary_slices(const ZSeries& z, const std::vector<double>& t, const TimeGrid& grid) {
    const auto begin = static_cast<std::size_t>(grid.stationary_begin());
    return {std::span<const Complex>(z).subspan(begin),
            std::span<const double>(t).subspan(begin)};
}

} // namespace

double stationary_mean_abs(const ZSeries& z, const TimeGrid& grid) {
    const auto t = grid.points();
    const auto [zs, ts] = stationary_slices(z, t, grid);
    return window_mean_abs(zs, ts);
}

double stationary_deviation(const ZSeries& z, const TimeGrid& grid) {
    const auto t = grid.points();
    const auto [zs, ts] = stationary_slices(z, t, grid);
    return estimate_deviation(zs, ts);
}

VanishingResult vanishing_from_means(const std::vector<int>& n_values,
                                     const std::vector<double>& means,
                                     const CriteriaConfig& cfg, bool allow_single_n) {
    if (n_values.size() != means.size())
        throw std::invalid_argument("vanishing_from_means: size mismatch");
    if (!allow_single_n && n_values.size() < 3)
        throw std::invalid_argument("check_vanishing: need >= 3 N values");
    VanishingResult res;
    res.n_values = n_values;
    res.means = means;
    res.threshold = cfg.vanish_threshold;
    res.single_n = n_values.size() < 2;
    res.monotone_ok = true;
    for (std::size_t i = 0; i + 1 < means.size(); ++i)
        if (means[i + 1] > means[i] * (1.0 + cfg.monotone_rel_tol)) res.monotone_ok = false;
    res.threshold_ok = means.back() <= cfg.vanish_threshold;
    res.pass = res.monotone_ok && res.threshold_ok;
    return res;
}

VanishingResult check_vanishing(const std::vector<int>& n_values,
                                const std::function<ZSeries(int)>& family,
                                const TimeGrid& grid, const CriteriaConfig& cfg) {
    if (n_values.size() < 3)
        throw std::invalid_argument("check_vanishing: need >= 3 N values");
    if (!std::is_sorted(n_values.begin(), n_values.end()))
        throw std::invalid_argument("check_vanishing: N values must be ascending");
    std::vector<double> means;
    means.reserve(n_values.size());
    for (const int n : n_values) means.push_back(stationary_mean_abs(family(n), grid));
    return vanishing_from_means(n_values, means, cfg, false);
}

TimeAverageResult check_time_average(const ZSeries& z, const TimeGrid& grid,
                                     const CriteriaConfig& cfg) {
    if (static_cast<int>(z.size()) != grid.n_samples)
        throw std::invalid_argument("check_time_average: series does not match grid");
    if (grid.n_samples < 100)
        throw std::invalid_argument("check_time_average: need >= 100 samples");

    TimeAverageResult res;
    res.threshold = cfg.timeavg_threshold;
    res.running_abs.resize(z.size());
    res.running_abs[0] = std::abs(z[0]);
    const double dt = grid.dt();
    Complex integral(0.0, 0.0);
    for (std::size_t i = 1; i < z.size(); ++i) {
        integral += 0.5 * dt * (z[i - 1] + z[i]);
        res.running_abs[i] = std::abs(integral) / (dt * static_cast<double>(i));
    }
    res.final_abs = res.running_abs.back();

    // envelope over [t_max/2, 3 t_max/4] must exceed the one over the tail
    const std::size_t half = static_cast<std::size_t>(grid.stationary_begin());
    const std::size_t three_quarter = half + (z.size() - half) / 2;
    double early = 0.0, late = 0.0;
    for (std::size_t i = half; i < three_quarter; ++i)
        early = std::max(early, res.running_abs[i]);
    for (std::size_t i = three_quarter; i < z.size(); ++i)
        late = std::max(late, res.running_abs[i]);
    res.envelope_decreasing = late < early || late <= 1e-15;

    res.pass = res.final_abs <= res.threshold && res.envelope_decreasing;
    return res;
}

ScalingResult check_deviation_scaling(const std::vector<ScalingPoint>& table,
                                      const CriteriaConfig& cfg) {
    std::map<int, std::pair<double, int>> by_n; // N -> (sum, count)
    for (const auto& p : table) {
        auto& acc = by_n[p.n];
        acc.first += p.delta_z;
        acc.second += 1;
    }
    if (by_n.size() < 4)
        throw std::invalid_argument("check_deviation_scaling: need >= 4 distinct N");
    for (const auto& [n, acc] : by_n)
        if (acc.second < 5)
            throw std::invalid_argument("check_deviation_scaling: need >= 5 seeds per N");

    ScalingResult res;
    for (const auto& [n, acc] : by_n) {
        res.n_values.push_back(n);
        res.delta_avg.push_back(acc.first / acc.second);
    }

    const double max_dz = *std::max_element(res.delta_avg.begin(), res.delta_avg.end());
    if (max_dz == 0.0) {
        res.no_fluctuation = true;
        res.pass = false;
        return res;
    }

    std::vector<double> log_n, n_lin, log_dz;
    for (std::size_t i = 0; i < res.n_values.size(); ++i) {
        if (res.delta_avg[i] <= 0.0) continue;
        log_n.push_back(std::log(static_cast<double>(res.n_values[i])));
        n_lin.push_back(static_cast<double>(res.n_values[i]));
        log_dz.push_back(std::log(res.delta_avg[i]));
    }
    FitResult power = linear_fit(log_n, log_dz);
    power.slope = -power.slope; // report p with log dz = a - p log N
    res.power_fit = power;
    FitResult expo = linear_fit(n_lin, log_dz);
    expo.slope = -expo.slope; // report r with log dz = a - r N
    res.exp_fit = expo;

    bool per_step = true;
    for (std::size_t i = 0; i + 1 < res.delta_avg.size(); ++i)
        if (res.delta_avg[i + 1] > res.delta_avg[i] * (1.0 + cfg.monotone_rel_tol))
            per_step = false;
    const bool net_decrease =
        res.delta_avg.back() <= res.delta_avg.front() * (1.0 - cfg.monotone_rel_tol);
    res.pass = per_step && net_decrease;
    return res;
}

StabilityResult check_pointer_stability(const CompositeSystem& model,
                                        const std::vector<std::pair<int, StateVector>>& pointer_states,
                                        const std::vector<StateVector>& env_states,
                                        const TimeGrid& grid, const CriteriaConfig& cfg,
                                        const dynamics::DynamicsConfig& dyn) {
    if (pointer_states.empty())
        throw std::invalid_argument("check_pointer_stability: no rank-1 pointer states");
    if (env_states.empty())
        throw std::invalid_argument("check_pointer_stability: no environment samples");

    StabilityResult res;
    res.threshold = 1.0 - cfg.stability_tol;
    const Eigen::Index d_e = model.d_e();
    for (const auto& [label, ket_m] : pointer_states) {
        double min_f = 1.0;
        for (const auto& chi : env_states) {
            const auto states = dynamics::evolve_dense(model, kron(ket_m, chi), grid, dyn);
            for (const auto& psi : states) {
                // F = <m| rho_S |m> = || m^dag Psi ||^2 with Psi the d_s x d_e
                // amplitude matrix
                Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic,
                                               Eigen::RowMajor>>
                    amp(psi.data(), model.d_s, d_e);
                const double f = (ket_m.adjoint() * amp).squaredNorm();
                min_f = std::min(min_f, f);
            }
        }
        res.min_per_label.emplace_back(label, min_f);
        res.min_fidelity = std::min(res.min_fidelity, min_f);
    }
    res.pass = res.min_fidelity >= res.threshold;
    return res;
}

const char* to_string(R1Verdict v) {
    switch (v) {
        case R1Verdict::eisr_candidate: return "eisr_candidate";
        case R1Verdict::no_pointer_basis: return "no_pointer_basis";
        case R1Verdict::criteria_failed: return "criteria_failed";
    }
    return "unknown";
}

R1Verdict verdict_r1(const CriteriaReport& report) {
    if (!report.cond_A_separable || !report.cond_B_pass)
        return R1Verdict::no_pointer_basis;
    const bool a_fail = report.cond_a && !report.cond_a->pass;
    const bool b_fail = report.cond_b && !report.cond_b->pass;
    const bool c_fail = report.cond_c && !report.cond_c->pass;
    const bool d_fail = report.cond_d && !report.cond_d->pass;
    if (a_fail || b_fail || c_fail || d_fail) return R1Verdict::criteria_failed;
    return R1Verdict::eisr_candidate;
}

nlohmann::json report_json(const CriteriaReport& report,
                           const std::vector<ScalingPoint>& table) {
    nlohmann::json j;
    j["cond_A"] = {{"separable", report.cond_A_separable},
                   {"schmidt_rank", report.schmidt_rank},
                   {"weights", report.weights}};
    j["cond_B"] = {{"pass", report.cond_B_pass},
                   {"max_commutator_norm", report.max_commutator_norm},
                   {"picture", "interaction"}};
    if (report.cond_a) {
        j["cond_a"] = {{"n_values", report.cond_a->n_values},
                       {"means", report.cond_a->means},
                       {"threshold", report.cond_a->threshold},
                       {"single_n", report.cond_a->single_n},
                       {"pass", report.cond_a->pass}};
    } else {
        j["cond_a"] = nullptr;
    }
    if (report.cond_b) {
        j["cond_b"] = {{"final_abs", report.cond_b->final_abs},
                       {"threshold", report.cond_b->threshold},
                       {"envelope_decreasing", report.cond_b->envelope_decreasing},
                       {"pass", report.cond_b->pass}};
    } else {
        j["cond_b"] = nullptr;
    }
    if (report.cond_c) {
        nlohmann::json tbl = nlohmann::json::array();
        for (std::size_t i = 0; i < report.cond_c->n_values.size(); ++i)
            tbl.push_back({{"N", report.cond_c->n_values[i]},
                           {"delta_z", report.cond_c->delta_avg[i]}});
        j["cond_c"] = {{"table", tbl},
                       {"power_fit",
                        {{"p", report.cond_c->power_fit.slope},
                         {"r2", report.cond_c->power_fit.r2}}},
                       {"exp_fit",
                        {{"r", report.cond_c->exp_fit.slope},
                         {"r2", report.cond_c->exp_fit.r2}}},
                       {"no_fluctuation", report.cond_c->no_fluctuation},
                       {"pass", report.cond_c->pass}};
    } else {
        j["cond_c"] = nullptr;
    }
    if (report.cond_d) {
        nlohmann::json per_m = nlohmann::json::array();
        for (const auto& [label, f] : report.cond_d->min_per_label)
            per_m.push_back({{"m", label}, {"min_fidelity", f}});
        j["cond_d"] = {{"min_fidelity", report.cond_d->min_fidelity},
                       {"per_m", per_m},
                       {"threshold", report.cond_d->threshold},
                       {"pass", report.cond_d->pass}};
    } else {
        j["cond_d"] = nullptr;
    }
    if (!table.empty()) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& p : table)
            rows.push_back({{"N", p.n},
                            {"seed", p.seed_index},
                            {"delta_z", p.delta_z},
                            {"mean_abs_z", p.mean_abs_z}});
        j["sweep_points"] = rows;
    }
    j["flags"] = report.flags;
    j["r1_verdict"] = to_string(report.verdict);
    return j;
}

} // namespace einselect::criteria
