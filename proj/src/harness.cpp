#include "einselect/harness.hpp"

#include "einselect/matrix_io.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace einselect::harness {

namespace {

TimeGrid parse_times(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("t_max") || !j.contains("n_samples"))
        throw std::invalid_argument("times: expected {t_max, n_samples}");
    const double t_max = j.at("t_max").get<double>();
    const int n = j.at("n_samples").get<int>();
    if (!(t_max > 0.0)) throw std::invalid_argument("times.t_max: must be positive");
    if (n < 100) throw std::invalid_argument("times.n_samples: must be >= 100");
    return TimeGrid(t_max, n);
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
    int workers = jobs > 0 ? jobs : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min<int>(workers, static_cast<int>(count)));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr err;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!err) err = std::current_exception();
                    return;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

std::vector<double> coarse_grid(const TimeGrid& times, int n_points) {
    std::vector<double> grid(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i)
        grid[static_cast<std::size_t>(i)] = times.t_max * i / (n_points - 1);
    return grid;
}

void ensure_output_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw std::runtime_error("output_dir: cannot create '" + dir.string() +
                                 "': " + ec.message());
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path.string());
    os << j.dump(2) << "\n";
}

// Environment samples for the condition-(d) check: seeded Haar product states
// plus the computational basis states (all of them while the environment is
// small, the two extremal ones otherwise).
std::vector<StateVector> stability_env_samples(const CompositeSystem& model,
                                               std::uint64_t master_seed, int n_seeds) {
    constexpr std::uint64_t kStabilityCounterBase = 1u << 20;
    std::vector<StateVector> samples;
    const int n = static_cast<int>(model.env_dims.size());
    for (int s = 0; s < n_seeds; ++s) {
        rng::Stream stream = rng::substream(master_seed, kStabilityCounterBase + s);
        StateVector chi = models::haar_qubit(stream);
        for (int k = 1; k < n; ++k) chi = kron(chi, models::haar_qubit(stream)).eval();
        samples.push_back(std::move(chi));
    }
    const Eigen::Index d_e = model.d_e();
    if (d_e <= 16) {
        for (Eigen::Index i = 0; i < d_e; ++i) samples.push_back(basis_ket(d_e, i));
    } else {
        samples.push_back(basis_ket(d_e, 0));
        samples.push_back(basis_ket(d_e, d_e - 1));
    }
    return samples;
}

bool spin_bath_family(models::ModelKind kind) {
    return kind == models::ModelKind::spin_bath ||
           kind == models::ModelKind::rotated_spin_bath;
}

nlohmann::json config_block(const RunConfig& config, const std::vector<int>& n_list,
                            int seeds_per_n) {
    nlohmann::json j;
    j["model"] = config.model.to_json();
    j["times"] = {{"t_max", config.times.t_max}, {"n_samples", config.times.n_samples}};
    if (!n_list.empty()) j["n_list"] = n_list;
    j["seeds_per_n"] = seeds_per_n;
    j["stability_n"] = config.stability_n;
    j["seed"] = config.model.seed;
    return j;
}

} // namespace

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
    if (!j.contains("model")) throw std::invalid_argument("config.model: missing");
    RunConfig config;
    config.model = models::ModelSpec::from_json(j.at("model"));
    if (j.contains("times")) config.times = parse_times(j.at("times"));
    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        SweepSpec sweep;
        if (!s.contains("N_list")) throw std::invalid_argument("sweep.N_list: missing");
        sweep.n_list = s.at("N_list").get<std::vector<int>>();
        if (sweep.n_list.empty()) throw std::invalid_argument("sweep.N_list: empty");
        if (!std::is_sorted(sweep.n_list.begin(), sweep.n_list.end()))
            throw std::invalid_argument("sweep.N_list: must be ascending");
        for (const int n : sweep.n_list)
            if (n < 1) throw std::invalid_argument("sweep.N_list: entries must be >= 1");
        if (s.contains("seeds_per_N")) sweep.seeds_per_n = s.at("seeds_per_N").get<int>();
        if (sweep.seeds_per_n < 1)
            throw std::invalid_argument("sweep.seeds_per_N: must be >= 1");
        config.sweep = std::move(sweep);
    }
    if (j.contains("thresholds")) {
        const auto& t = j.at("thresholds");
        if (t.contains("vanish")) config.thresholds.vanish = t.at("vanish").get<double>();
        if (t.contains("time_avg")) config.thresholds.time_avg = t.at("time_avg").get<double>();
        if (t.contains("stability"))
            config.thresholds.stability = t.at("stability").get<double>();
        if (t.contains("separability"))
            config.thresholds.separability = t.at("separability").get<double>();
        if (t.contains("nondemolition"))
            config.thresholds.nondemolition = t.at("nondemolition").get<double>();
    }
    if (j.contains("output_dir"))
        config.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("jobs")) config.jobs = j.at("jobs").get<int>();
    if (j.contains("stability_n")) config.stability_n = j.at("stability_n").get<int>();
    if (j.contains("stability_seeds"))
        config.stability_seeds = j.at("stability_seeds").get<int>();
    if (j.contains("nondem_grid")) config.nondem_grid = j.at("nondem_grid").get<int>();
    if (j.contains("dense_cap")) config.dense_cap = j.at("dense_cap").get<Eigen::Index>();
    if (config.nondem_grid < 2)
        throw std::invalid_argument("nondem_grid: must be >= 2");
    return config;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("config: cannot open " + path.string());
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("config: " + path.string() + " is not valid JSON: " + e.what());
    }
    return from_json(j);
}

criteria::CriteriaConfig RunConfig::criteria_config() const {
    criteria::CriteriaConfig cfg;
    cfg.vanish_threshold = thresholds.vanish;
    cfg.timeavg_threshold = thresholds.time_avg;
    cfg.stability_tol = thresholds.stability;
    return cfg;
}

analysis::AnalysisConfig RunConfig::analysis_config() const {
    analysis::AnalysisConfig cfg;
    cfg.sep_tol = thresholds.separability;
    cfg.nondem_tol = thresholds.nondemolition;
    return cfg;
}

void write_trajectory_csv(const std::filesystem::path& path, const std::vector<double>& t,
                          const dynamics::ZSeries& z, const std::vector<double>& purity) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path.string());
    os << "t,re_z,im_z,abs_z,purity\n";
    for (std::size_t i = 0; i < t.size(); ++i) {
        os << io::format_double(t[i]) << "," << io::format_double(z[i].real()) << ","
           << io::format_double(z[i].imag()) << "," << io::format_double(std::abs(z[i]))
           << "," << io::format_double(purity[i]) << "\n";
    }
}

int cmd_analyze(const RunConfig& config) {
    ensure_output_dir(config.output_dir);
    const models::BuiltModel built = models::build(config.model);
    const auto acfg = config.analysis_config();
    const auto sep = analysis::check_separability(built.system.h_int, built.system.d_s,
                                                  built.system.d_e(), acfg);
    const auto nondem = analysis::check_nondemolition(
        built.system, coarse_grid(config.times, config.nondem_grid), acfg);

    nlohmann::json report = analysis::analysis_report(sep, nondem);
    report["config"] = config_block(config, {}, 0);
    write_json(config.output_dir / "report.json", report);
    return (sep.separable && nondem.pass) ? kExitPass : kExitFail;
}

int cmd_simulate(const RunConfig& config) {
    ensure_output_dir(config.output_dir);
    const models::BuiltModel built = models::build(config.model);
    const auto acfg = config.analysis_config();
    const auto sep = analysis::check_separability(built.system.h_int, built.system.d_s,
                                                  built.system.d_e(), acfg);
    const auto nondem = analysis::check_nondemolition(
        built.system, coarse_grid(config.times, config.nondem_grid), acfg);

    nlohmann::json report = analysis::analysis_report(sep, nondem);
    report["config"] = config_block(config, {}, 0);

    if (!sep.separable || !nondem.pass) {
        report["r1_verdict"] = "no_pointer_basis";
        write_json(config.output_dir / "report.json", report);
        return kExitFail;
    }

    const auto& pointer = *sep.certificate;
    const auto states = pointer.rank_one_states();
    if (states.size() < 2) {
        // single (or rank > 1) sector: z extraction undefined
        report["flags"] = {"degenerate_no_rank1_pointer_pairs"};
        report["cond_b"] = nullptr;
        write_json(config.output_dir / "report.json", report);
        return kExitFail;
    }

    const auto t = config.times.points();
    const dynamics::DynamicsConfig dyn{config.dense_cap};
    const auto ccfg = config.criteria_config();

    dynamics::Trajectory trajectory;
    trajectory.grid = config.times;
    std::vector<Complex> amplitudes(pointer.system_projectors.size(), Complex(0.0, 0.0));
    for (const auto& [label, ket] : states)
        amplitudes[static_cast<std::size_t>(label)] = ket.dot(built.init.system);

    if (spin_bath_family(config.model.kind)) {
        trajectory.backend = dynamics::Backend::factorized;
        const auto g = models::couplings_for(config.model, config.model.n, 0);
        const auto factors = models::env_factors(config.model.env_state, config.model.n);
        dynamics::ZSeries z01 = dynamics::factorized_z(g, factors, config.times);
        const auto& [m0, k0] = states[0];
        const auto& [m1, k1] = states[1];
        trajectory.z[{m0, m1}] = std::move(z01);
    } else {
        trajectory.backend = dynamics::Backend::dense;
        trajectory.rho_s = dynamics::reduced_density(built.system, built.init,
                                                     config.times, dyn);
        for (std::size_t a = 0; a < states.size(); ++a)
            for (std::size_t b = a + 1; b < states.size(); ++b) {
                const auto& [m, ket_m] = states[a];
                const auto& [mp, ket_mp] = states[b];
                const Complex denom = amplitudes[static_cast<std::size_t>(m)] *
                                      std::conj(amplitudes[static_cast<std::size_t>(mp)]);
                if (std::abs(denom) < 1e-12)
                    throw std::runtime_error(
                        "simulate: zero pointer amplitude; choose a system state with "
                        "support on every pointer state");
                dynamics::ZSeries z;
                z.reserve(trajectory.rho_s.size());
                for (const auto& r : trajectory.rho_s)
                    z.push_back(ket_m.dot(r * ket_mp) / denom);
                trajectory.z[{m, mp}] = std::move(z);
            }
    }

    const auto purity =
        trajectory.backend == dynamics::Backend::dense
            ? dynamics::purity_series(trajectory.rho_s)
            : dynamics::purity_from_z(amplitudes, trajectory.z, config.times.n_samples);

    nlohmann::json cond_b_pairs = nlohmann::json::object();
    bool all_pass = true;
    for (const auto& [pair, z] : trajectory.z) {
        const auto res = criteria::check_time_average(z, config.times, ccfg);
        all_pass = all_pass && res.pass;
        const std::string key =
            std::to_string(pair.first) + "_" + std::to_string(pair.second);
        cond_b_pairs[key] = {{"final_abs", res.final_abs},
                             {"threshold", res.threshold},
                             {"envelope_decreasing", res.envelope_decreasing},
                             {"pass", res.pass}};
        write_trajectory_csv(config.output_dir /
                                 ("z_" + std::to_string(pair.first) + "_" +
                                  std::to_string(pair.second) + ".csv"),
                             t, z, purity);
    }
    report["cond_b"] = cond_b_pairs;
    report["cond_b_pass"] = all_pass;
    report["backend"] =
        trajectory.backend == dynamics::Backend::dense ? "dense" : "factorized";
    write_json(config.output_dir / "report.json", report);
    return all_pass ? kExitPass : kExitFail;
}

int cmd_sweep(const RunConfig& config) {
    ensure_output_dir(config.output_dir);
    const std::vector<int> n_list =
        config.sweep ? config.sweep->n_list : std::vector<int>{config.model.n};
    const int seeds_per_n = config.sweep ? config.sweep->seeds_per_n : 5;

    const auto acfg = config.analysis_config();
    const auto ccfg = config.criteria_config();

    criteria::CriteriaReport report;

    // structural phase at the smallest N in the sweep
    const models::BuiltModel structural =
        models::build_at(config.model, n_list.front(), 0);
    const auto sep = analysis::check_separability(
        structural.system.h_int, structural.system.d_s, structural.system.d_e(), acfg);
    const auto nondem = analysis::check_nondemolition(
        structural.system, coarse_grid(config.times, config.nondem_grid), acfg);
    report.cond_A_separable = sep.separable;
    report.schmidt_rank = sep.schmidt.rank();
    report.weights = sep.schmidt.weights;
    report.cond_B_pass = nondem.pass;
    report.max_commutator_norm = nondem.max_commutator_norm;

    nlohmann::json out;
    if (!sep.separable || !nondem.pass) {
        report.verdict = criteria::verdict_r1(report);
        out = criteria::report_json(report);
        out["analysis"] = analysis::analysis_report(sep, nondem);
        out["config"] = config_block(config, n_list, seeds_per_n);
        write_json(config.output_dir / "report.json", out);
        return kExitFail;
    }

    if (!spin_bath_family(config.model.kind))
        throw std::runtime_error(
            "sweep: z estimation is implemented for the (rotated) spin-bath family only");

    // N x seed sweep on the factorized backend
    struct Point {
        int n;
        int seed_index;
        double delta_z;
        double mean_abs;
        bool zero_coupling;
    };
    std::vector<Point> points;
    for (const int n : n_list)
        for (int j = 0; j < seeds_per_n; ++j) points.push_back({n, j, 0.0, 0.0, false});

    parallel_for(points.size(), config.jobs, [&](std::size_t i) {
        Point& p = points[i];
        const auto g = models::couplings_for(config.model, p.n, p.seed_index);
        const auto factors = models::env_factors(config.model.env_state, p.n);
        const auto z = dynamics::factorized_z(g, factors, config.times);
        p.mean_abs = criteria::stationary_mean_abs(z, config.times);
        p.delta_z = criteria::stationary_deviation(z, config.times);
        p.zero_coupling =
            std::all_of(g.begin(), g.end(), [](double x) { return x == 0.0; });
    });

    {
        std::ofstream csv(config.output_dir / "scaling.csv");
        if (!csv) throw std::runtime_error("cannot open scaling.csv");
        csv << "N,seed,delta_z,mean_abs_z\n";
        for (const auto& p : points)
            csv << p.n << "," << p.seed_index << "," << io::format_double(p.delta_z)
                << "," << io::format_double(p.mean_abs) << "\n";
    }

    if (std::all_of(points.begin(), points.end(),
                    [](const Point& p) { return p.zero_coupling; }))
        report.flags.push_back("degenerate_zero_coupling");

    // condition (a): seed-averaged stationary means per N
    std::vector<double> means;
    for (const int n : n_list) {
        double acc = 0.0;
        int count = 0;
        for (const auto& p : points)
            if (p.n == n) {
                acc += p.mean_abs;
                ++count;
            }
        means.push_back(acc / count);
    }
    if (n_list.size() >= 3) {
        report.cond_a = criteria::vanishing_from_means(n_list, means, ccfg, false);
    } else {
        report.cond_a = criteria::vanishing_from_means(n_list, means, ccfg, true);
        report.flags.push_back("cond_a_single_n_surrogate");
    }

    // condition (b) on the largest-N, first-seed trajectory
    {
        const int n_max = n_list.back();
        const auto g = models::couplings_for(config.model, n_max, 0);
        const auto factors = models::env_factors(config.model.env_state, n_max);
        const auto z = dynamics::factorized_z(g, factors, config.times);
        report.cond_b = criteria::check_time_average(z, config.times, ccfg);
    }

    // condition (c) needs >= 4 distinct N and >= 5 seeds
    if (n_list.size() >= 4 && seeds_per_n >= 5) {
        std::vector<criteria::ScalingPoint> table;
        for (const auto& p : points)
            table.push_back({p.n, p.seed_index, p.delta_z, p.mean_abs});
        report.cond_c = criteria::check_deviation_scaling(table, ccfg);
    } else {
        report.flags.push_back("cond_c_skipped_insufficient_sweep");
    }

    // condition (d) on a dense instance at stability_n
    {
        const models::BuiltModel stab =
            models::build_at(config.model, config.stability_n, 0);
        const auto stab_sep = analysis::check_separability(
            stab.system.h_int, stab.system.d_s, stab.system.d_e(), acfg);
        if (stab_sep.separable) {
            const auto pointer_states = stab_sep.certificate->rank_one_states();
            if (!pointer_states.empty()) {
                const auto env_samples = stability_env_samples(
                    stab.system, config.model.seed, config.stability_seeds);
                report.cond_d = criteria::check_pointer_stability(
                    stab.system, pointer_states, env_samples, config.times, ccfg,
                    dynamics::DynamicsConfig{config.dense_cap});
            } else {
                report.flags.push_back("cond_d_skipped_no_rank1_sectors");
            }
        } else {
            report.flags.push_back("cond_d_skipped_nonseparable_at_stability_n");
        }
    }

    report.verdict = criteria::verdict_r1(report);

    std::vector<criteria::ScalingPoint> rows;
    for (const auto& p : points) rows.push_back({p.n, p.seed_index, p.delta_z, p.mean_abs});
    out = criteria::report_json(report, rows);
    out["analysis"] = analysis::analysis_report(sep, nondem);
    out["config"] = config_block(config, n_list, seeds_per_n);
    write_json(config.output_dir / "report.json", out);
    return report.verdict == criteria::R1Verdict::eisr_candidate ? kExitPass : kExitFail;
}

} // namespace einselect::harness
