// acceptance_main.cpp — release gate: one check per criterion, each printed
// as a [PASS]/[FAIL] line with the measured numbers. Exits nonzero if any
// check fails.

#include "einselect/harness.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

using namespace einselect;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass{false};
    std::string detail;
};

double seconds_since(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string slurp(const fs::path& path) {
    std::ifstream is(path);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

StateVector balanced_qubit() {
    StateVector v(2);
    v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    return v;
}

std::vector<double> draw_g(std::uint64_t master, int n, int seed_index) {
    rng::Stream stream = rng::sweep_point_stream(master, n, seed_index);
    std::vector<double> g(static_cast<std::size_t>(n));
    for (auto& gk : g) gk = stream.uniform(0.5, 1.5);
    return g;
}

dynamics::ZSeries canonical_z(std::uint64_t master, int n, int seed_index,
                              const TimeGrid& grid) {
    std::vector<StateVector> factors(static_cast<std::size_t>(n), balanced_qubit());
    return dynamics::factorized_z(draw_g(master, n, seed_index), factors, grid);
}

// ---------------------------------------------------------------------------
// 1. separability classification over the named model suite
// ---------------------------------------------------------------------------
Outcome check_classification() {
    const auto start = std::chrono::steady_clock::now();
    struct Entry {
        std::string name;
        QOperator h;
        Eigen::Index d_s, d_e;
        bool separable;
    };
    std::vector<Entry> suite;
    suite.push_back({"spin_bath", models::build_spin_bath(2, {0.7, 1.3}).h_int, 2, 4, true});
    suite.push_back({"rotated_0.3",
                     models::build_rotated_spin_bath(2, {0.7, 1.3}, 0.3).h_int, 2, 4, true});
    suite.push_back({"rotated_pi_2",
                     models::build_rotated_spin_bath(2, {0.7, 1.3}, std::numbers::pi / 2.0).h_int,
                     2, 4, true});
    suite.push_back({"common_factor", kron(sigma_z(), sigma_x() + sigma_z()), 2, 2, true});
    suite.push_back({"xz_n1", models::build_nonseparable_xz(1, {1.0}, {1.0}).h_int, 2, 2, false});
    suite.push_back({"xz_n2",
                     models::build_nonseparable_xz(2, {0.6, 1.1}, {0.9, 0.4}).h_int, 2, 4,
                     false});
    suite.push_back({"heisenberg",
                     kron(sigma_x(), sigma_x()) + kron(sigma_y(), sigma_y()) +
                         kron(sigma_z(), sigma_z()),
                     2, 2, false});
    suite.push_back({"zero", QOperator::Zero(4, 4), 2, 2, true});
    suite.push_back({"identity", identity_op(4), 2, 2, true});

    int wrong = 0;
    double worst_cert = 0.0;
    std::string wrong_names;
    for (const auto& entry : suite) {
        const auto verdict = analysis::check_separability(entry.h, entry.d_s, entry.d_e);
        if (verdict.separable != entry.separable) {
            ++wrong;
            wrong_names += " " + entry.name;
            continue;
        }
        if (verdict.separable) {
            const double scale = std::max(entry.h.norm(), 1e-30);
            worst_cert = std::max(
                worst_cert, (verdict.certificate->reconstruct() - entry.h).norm() / scale);
        }
    }
    const double elapsed = seconds_since(start);
    std::ostringstream detail;
    detail << suite.size() << " models, " << wrong << " misclassified" << wrong_names
           << ", max certificate error " << worst_cert << " (tol 1e-9), " << elapsed
           << "s (limit 5s)";
    return {wrong == 0 && worst_cert <= 1e-9 && elapsed < 5.0, detail.str()};
}

// ---------------------------------------------------------------------------
// 2. dense and factorized backends agree over seeded draws
// ---------------------------------------------------------------------------
Outcome check_backend_equivalence() {
    const auto start = std::chrono::steady_clock::now();
    const TimeGrid grid(20.0, 500);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const int n = 2 + (i % 7); // N in 2..8
        rng::Stream stream = rng::sweep_point_stream(42, n, 100 + i);
        std::vector<double> g(static_cast<std::size_t>(n));
        for (auto& gk : g) gk = stream.uniform(0.5, 1.5);
        std::vector<StateVector> factors;
        for (int k = 0; k < n; ++k) factors.push_back(models::haar_qubit(stream));

        const auto sys = models::build_spin_bath(n, g);
        const auto verdict = analysis::check_separability(sys.h_int, 2, sys.d_e());
        const auto init = ProductInitialState::make(balanced_qubit(), factors);
        const auto dense = dynamics::correlation_amplitude_dense(
            sys, init, verdict.certificate->rank_one_states(), grid, 0, 1);
        const auto fast = dynamics::factorized_z(g, factors, grid);
        for (std::size_t s = 0; s < fast.size(); ++s)
            worst = std::max(worst, std::abs(dense[s] - fast[s]));
    }
    const double elapsed = seconds_since(start);
    std::ostringstream detail;
    detail << "20 draws, N in 2..8, max |z_dense - z_factorized| = " << worst
           << " (tol 1e-10), " << elapsed << "s (limit 120s)";
    return {worst <= 1e-10 && elapsed < 120.0, detail.str()};
}

// ---------------------------------------------------------------------------
// 3. factorization of the reduced density matrix through z(t)
// ---------------------------------------------------------------------------
Outcome check_rho_factorization() {
    const int n = 6;
    const auto g = draw_g(42, n, 0);
    const auto sys = models::build_spin_bath(n, g);
    models::EnvStateSpec env;
    env.mode = models::EnvStateSpec::Mode::haar;
    env.haar_seed = 42;
    const auto factors = models::env_factors(env, n);
    const auto init = ProductInitialState::make(balanced_qubit(), factors);

    const TimeGrid grid(20.0, 500);
    const auto rho = dynamics::reduced_density(sys, init, grid);
    const auto z = dynamics::factorized_z(g, factors, grid);
    const Complex c0 = init.system(0), c1 = init.system(1);

    double max_offdiag = 0.0, max_diag_drift = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        max_offdiag = std::max(max_offdiag,
                               std::abs(rho[i](0, 1) - c0 * std::conj(c1) * z[i]));
        max_diag_drift = std::max(max_diag_drift,
                                  std::abs(rho[i](0, 0).real() - std::norm(c0)));
        max_diag_drift = std::max(max_diag_drift,
                                  std::abs(rho[i](1, 1).real() - std::norm(c1)));
    }
    std::ostringstream detail;
    detail << "N=6 haar environment: max |rho_01 - C0 C1* z| = " << max_offdiag
           << ", max diagonal drift = " << max_diag_drift << " (tol 1e-10)";
    return {max_offdiag <= 1e-10 && max_diag_drift <= 1e-10, detail.str()};
}

// ---------------------------------------------------------------------------
// 4. condition (b) surrogate at N=8 vs N=4
// ---------------------------------------------------------------------------
Outcome check_time_average_surrogate() {
    const TimeGrid grid(200.0, 2000);
    const auto res8 = criteria::check_time_average(canonical_z(42, 8, 0, grid), grid);
    const auto res4 = criteria::check_time_average(canonical_z(42, 4, 0, grid), grid);
    std::ostringstream detail;
    detail << "final |<z>_T|: N=8 " << res8.final_abs << " (threshold 0.05), N=4 "
           << res4.final_abs << ", ratio " << res8.final_abs / res4.final_abs
           << " (must be <= 0.5)";
    return {res8.pass && res8.final_abs <= 0.05 &&
                res8.final_abs <= 0.5 * res4.final_abs,
            detail.str()};
}

// ---------------------------------------------------------------------------
// 5. condition (c) surrogate: deviation scaling sweep plus fit recovery
// ---------------------------------------------------------------------------
Outcome check_deviation_scaling() {
    const auto start = std::chrono::steady_clock::now();
    const TimeGrid grid(200.0, 2000);
    std::vector<criteria::ScalingPoint> table;
    for (const int n : {4, 6, 8, 10, 12})
        for (int seed = 0; seed < 5; ++seed) {
            const auto z = canonical_z(42, n, seed, grid);
            table.push_back({n, seed, criteria::stationary_deviation(z, grid),
                             criteria::stationary_mean_abs(z, grid)});
        }
    const auto res = criteria::check_deviation_scaling(table);

    std::vector<criteria::ScalingPoint> synthetic;
    for (const int n : {4, 6, 8, 10, 12})
        for (int seed = 0; seed < 5; ++seed)
            synthetic.push_back({n, seed, 0.8 * std::pow(n, -0.5), 0.0});
    const auto fit = criteria::check_deviation_scaling(synthetic);
    const bool fit_ok =
        std::abs(fit.power_fit.slope - 0.5) <= 1e-6 && fit.power_fit.r2 >= 1.0 - 1e-9;

    const double elapsed = seconds_since(start);
    std::ostringstream detail;
    detail << "delta_z:";
    for (std::size_t i = 0; i < res.n_values.size(); ++i)
        detail << " N=" << res.n_values[i] << ":" << res.delta_avg[i];
    detail << "; power p=" << res.power_fit.slope << " (R2 " << res.power_fit.r2
           << "), exp r=" << res.exp_fit.slope << " (R2 " << res.exp_fit.r2
           << "); synthetic p=" << fit.power_fit.slope << "; " << elapsed
           << "s (limit 180s)";
    return {res.pass && fit_ok && elapsed < 180.0, detail.str()};
}

// ---------------------------------------------------------------------------
// 6. condition (d): pointer stability and its non-separable counterexample
// ---------------------------------------------------------------------------
Outcome check_pointer_stability() {
    const TimeGrid grid(10.0, 201);
    const int n = 3;

    const auto sys = models::build_spin_bath(n, draw_g(42, n, 0));
    const auto verdict = analysis::check_separability(sys.h_int, 2, sys.d_e());
    std::vector<StateVector> env_states;
    for (int s = 0; s < 5; ++s) {
        rng::Stream stream = rng::substream(42, (1u << 20) + s);
        StateVector chi = models::haar_qubit(stream);
        for (int k = 1; k < n; ++k) chi = kron(chi, models::haar_qubit(stream)).eval();
        env_states.push_back(chi);
    }
    for (Eigen::Index i = 0; i < sys.d_e(); ++i) env_states.push_back(basis_ket(sys.d_e(), i));
    const auto stable = criteria::check_pointer_stability(
        sys, verdict.certificate->rank_one_states(), env_states, grid);

    rng::Stream xz_stream = rng::sweep_point_stream(43, n, 0);
    std::vector<double> g(static_cast<std::size_t>(n)), h(static_cast<std::size_t>(n));
    for (auto& x : g) x = xz_stream.uniform(0.5, 1.5);
    for (auto& x : h) x = xz_stream.uniform(0.5, 1.5);
    const auto bad_sys = models::build_nonseparable_xz(n, g, h);
    const std::vector<std::pair<int, StateVector>> candidate{{0, basis_ket(2, 0)},
                                                             {1, basis_ket(2, 1)}};
    const auto unstable =
        criteria::check_pointer_stability(bad_sys, candidate, env_states, grid);

    std::ostringstream detail;
    detail << "spin bath min fidelity " << stable.min_fidelity
           << " (must be >= 1-1e-8); xz computational-basis min fidelity "
           << unstable.min_fidelity << " (must be < 0.99)";
    return {stable.min_fidelity >= 1.0 - 1e-8 && unstable.min_fidelity < 0.99,
            detail.str()};
}

// ---------------------------------------------------------------------------
// 7. verdict logic and exit codes on the shipped configurations
// ---------------------------------------------------------------------------
Outcome check_verdict_logic(const fs::path& config_dir, const fs::path& out_root) {
    struct Case {
        const char* file;
        const char* verdict;
        int exit_code;
    };
    const std::vector<Case> cases{{"spin_bath_sweep.json", "eisr_candidate", 0},
                                  {"nonseparable_xz.json", "no_pointer_basis", 2},
                                  {"spin_bath_n1.json", "criteria_failed", 2}};
    std::ostringstream detail;
    bool ok = true;
    for (const auto& c : cases) {
        auto config = harness::RunConfig::from_file(config_dir / c.file);
        config.output_dir = out_root / fs::path(c.file).stem();
        const int code = harness::cmd_sweep(config);
        const auto report =
            nlohmann::json::parse(slurp(config.output_dir / "report.json"));
        const std::string verdict = report["r1_verdict"].get<std::string>();
        const bool case_ok = code == c.exit_code && verdict == c.verdict;
        ok = ok && case_ok;
        detail << fs::path(c.file).stem().string() << " -> " << verdict << " (exit "
               << code << ", want " << c.verdict << "/" << c.exit_code << "); ";
    }
    return {ok, detail.str()};
}

// ---------------------------------------------------------------------------
// 8. invariance suite: scale covariance, local-unitary invariance, determinism
// ---------------------------------------------------------------------------
Outcome check_invariances(const fs::path& config_dir, const fs::path& out_root) {
    std::ostringstream detail;

    // coupling-scale covariance at c = 3.7, factorized and dense routes
    const double c = 3.7;
    const int n = 3;
    const auto g = draw_g(42, n, 0);
    std::vector<double> g_scaled;
    for (const double gk : g) g_scaled.push_back(c * gk);
    const TimeGrid grid(6.0, 301), grid_scaled(6.0 / c, 301);
    std::vector<StateVector> factors(static_cast<std::size_t>(n), balanced_qubit());
    const auto z1 = dynamics::factorized_z(g, factors, grid);
    const auto z2 = dynamics::factorized_z(g_scaled, factors, grid_scaled);
    double scale_diff = 0.0;
    for (std::size_t i = 0; i < z1.size(); ++i)
        scale_diff = std::max(scale_diff, std::abs(z1[i] - z2[i]));

    const auto sys = models::build_spin_bath(n, g);
    auto sys_scaled = sys;
    sys_scaled.h_int = (c * sys.h_int).eval();
    const auto init = ProductInitialState::make(balanced_qubit(), factors);
    const auto pointer =
        analysis::check_separability(sys.h_int, 2, sys.d_e()).certificate->rank_one_states();
    const auto dense1 =
        dynamics::correlation_amplitude_dense(sys, init, pointer, grid, 0, 1);
    const auto dense2 =
        dynamics::correlation_amplitude_dense(sys_scaled, init, pointer, grid_scaled, 0, 1);
    for (std::size_t i = 0; i < dense1.size(); ++i)
        scale_diff = std::max(scale_diff, std::abs(dense1[i] - dense2[i]));
    const bool verdict_same =
        analysis::check_separability(sys_scaled.h_int, 2, sys.d_e()).separable;
    detail << "scale covariance max diff " << scale_diff << " (tol 1e-10); ";

    // local-unitary invariance over 20 rotations
    rng::Stream stream(rng::mix64(4242));
    const QOperator sep = models::build_spin_bath(2, {0.7, 1.3}).h_int;
    const QOperator nonsep = models::build_nonseparable_xz(1, {1.0}, {1.0}).h_int;
    bool unitary_ok = true;
    for (int trial = 0; trial < 20; ++trial) {
        const auto u_s = oracles::haar_unitary(2, stream);
        const auto u_e4 = oracles::haar_unitary(4, stream);
        const auto u_e2 = oracles::haar_unitary(2, stream);
        QOperator sep_rot = kron(u_s, u_e4) * sep * kron(u_s, u_e4).adjoint();
        sep_rot = 0.5 * (sep_rot + sep_rot.adjoint().eval());
        QOperator non_rot = kron(u_s, u_e2) * nonsep * kron(u_s, u_e2).adjoint();
        non_rot = 0.5 * (non_rot + non_rot.adjoint().eval());
        unitary_ok = unitary_ok && analysis::check_separability(sep_rot, 2, 4).separable &&
                     !analysis::check_separability(non_rot, 2, 2).separable;
    }
    detail << "local-unitary verdicts stable over 20 rotations: "
           << (unitary_ok ? "yes" : "NO") << "; ";

    // determinism: two identical sweep runs must be byte-identical
    auto config = harness::RunConfig::from_file(config_dir / "spin_bath_sweep.json");
    config.output_dir = out_root / "determinism_a";
    harness::cmd_sweep(config);
    auto config_b = config;
    config_b.output_dir = out_root / "determinism_b";
    config_b.jobs = 1;
    harness::cmd_sweep(config_b);
    const bool deterministic =
        slurp(config.output_dir / "scaling.csv") ==
            slurp(config_b.output_dir / "scaling.csv") &&
        slurp(config.output_dir / "report.json") ==
            slurp(config_b.output_dir / "report.json");
    detail << "sweep runs byte-identical: " << (deterministic ? "yes" : "NO");

    return {scale_diff <= 1e-10 && verdict_same && unitary_ok && deterministic,
            detail.str()};
}

} // namespace

int main() {
    const fs::path config_dir = EINSELECT_CONFIG_DIR;
    const fs::path out_root = fs::current_path() / "acceptance_out";
    fs::remove_all(out_root);
    fs::create_directories(out_root);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> checks{
        {"1. separability classification suite", check_classification},
        {"2. dense/factorized backend equivalence", check_backend_equivalence},
        {"3. reduced-density factorization identity", check_rho_factorization},
        {"4. time-average surrogate (condition b)", check_time_average_surrogate},
        {"5. deviation scaling sweep (condition c)", check_deviation_scaling},
        {"6. pointer stability (condition d)", check_pointer_stability},
        {"7. verdict logic and exit codes",
         [&] { return check_verdict_logic(config_dir, out_root); }},
        {"8. invariance suite",
         [&] { return check_invariances(config_dir, out_root); }},
    };

    int failures = 0;
    for (const auto& [name, fn] : checks) {
        Outcome outcome;
        try {
            outcome = fn();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        std::cout << (outcome.pass ? "[PASS] " : "[FAIL] ") << name << " — "
                  << outcome.detail << "\n";
        if (!outcome.pass) ++failures;
    }
    std::cout << (failures == 0 ? "all acceptance checks passed"
                                : std::to_string(failures) + " acceptance check(s) failed")
              << "\n";
    return failures == 0 ? 0 : 1;
}
