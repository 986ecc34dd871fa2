// models.hpp — Canonical model builders: the diagonal spin bath, its rotated
// variants, the non-separable XZ family, and seeded random interactions.

#pragma once

#include "einselect/composite.hpp"
#include "einselect/rng.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace einselect::models {

enum class ModelKind { spin_bath, rotated_spin_bath, nonseparable_xz, random_interaction, explicit_op };

ModelKind kind_from_string(const std::string& s);
const char* to_string(ModelKind k);

struct EnvStateSpec {
    enum class Mode { balanced, haar, explicit_amps };
    Mode mode{Mode::balanced};
    std::uint64_t haar_seed{0};
    std::vector<StateVector> amps; // one per particle, explicit mode

    static EnvStateSpec parse(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct ModelSpec {
    ModelKind kind{ModelKind::spin_bath};
    int n{1};
    std::vector<double> g;      // couplings (spin_bath/rotated/xz)
    std::vector<double> h;      // second-leg couplings (xz)
    std::optional<std::pair<double, double>> g_range; // draw g_k seeded instead
    double theta{0.0};          // rotation angle
    std::uint64_t seed{0};      // random_interaction / g_range draws
    Eigen::Index d_s{2};
    std::vector<Eigen::Index> env_dims;      // random_interaction / explicit
    std::string h_int_file, h_s_file, h_e_file; // explicit kind
    EnvStateSpec env_state;
    std::vector<Complex> system_amps; // empty -> balanced over pointer states

    static ModelSpec from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

// sigma_z (x) sum_k g_k sigma_z^(k), H_S = H_E = 0; pointer basis is the
// computational basis by construction.
CompositeSystem build_spin_bath(int n, const std::vector<double>& g);

// Spin bath conjugated by R_y(theta) (x) I; pointer basis rotates with it.
CompositeSystem build_rotated_spin_bath(int n, const std::vector<double>& g, double theta);

// sigma_x (x) sum_k g_k sigma_z^(k) + sigma_z (x) sum_k h_k sigma_x^(k);
// rejects all-zero g or h (those degenerate to a separable model).
CompositeSystem build_nonseparable_xz(int n, const std::vector<double>& g,
                                      const std::vector<double>& h);

// Hermitian interaction with independent Gaussian coefficients in the
// Hermitian product basis; bit-identical for a fixed seed.
CompositeSystem random_interaction(Eigen::Index d_s, const std::vector<Eigen::Index>& env_dims,
                                   std::uint64_t seed);

// sum_k g_k sigma_z^(k) on N qubits (the bath operator of the spin bath).
QOperator bath_sigma_z_sum(int n, const std::vector<double>& g);
QOperator rotation_y(double theta);

// Uniform (theta, phi) sphere point -> (cos(theta/2), e^{i phi} sin(theta/2)).
StateVector haar_qubit(rng::Stream& stream);

// Resolve an EnvStateSpec into per-particle factors. Haar mode draws from
// Stream(mix64(haar_seed)), two uniforms per particle.
std::vector<StateVector> env_factors(const EnvStateSpec& spec, int n);

// Draw couplings for a sweep point: explicit g if given, else g_range
// uniforms from sweep_point_stream(seed, n, seed_index).
std::vector<double> couplings_for(const ModelSpec& spec, int n, int seed_index);

struct BuiltModel {
    CompositeSystem system;
    ProductInitialState init;
};

// Build the model at its configured N with seed index 0.
BuiltModel build(const ModelSpec& spec);
BuiltModel build_at(const ModelSpec& spec, int n, int seed_index);

} // namespace einselect::models
