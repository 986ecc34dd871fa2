// dynamics.hpp — Exact composite evolution, conditional environment states,
// correlation amplitudes z_mm'(t), and the O(N) factorized spin-bath backend.

#pragma once

#include "einselect/analysis.hpp"
#include "einselect/composite.hpp"

#include <map>
#include <vector>

namespace einselect::dynamics {

using ZSeries = std::vector<Complex>;

struct DynamicsConfig {
    Eigen::Index dense_cap = 4096;
};

enum class Backend { dense, factorized };

struct Trajectory {
    TimeGrid grid;
    std::map<std::pair<int, int>, ZSeries> z; // keyed by pointer pair (m, m')
    std::vector<QOperator> rho_s;             // dense backend only
    Backend backend{Backend::dense};
};

// psi(t_i) = exp(-i H t_i) psi0 with H = H_S + H_E + H_int.
std::vector<StateVector> evolve_dense(const CompositeSystem& model,
                                      const StateVector& psi0, const TimeGrid& grid,
                                      const DynamicsConfig& cfg = {});

// rho_S(t) via partial trace of the evolved pure state.
std::vector<QOperator> reduced_density(const CompositeSystem& model,
                                       const ProductInitialState& init,
                                       const TimeGrid& grid,
                                       const DynamicsConfig& cfg = {});

// |chi_m(t)> = exp(-i t (H_E + sum_n gamma_mn Pi_n)) |chi>; m must label a
// rank-1 system sector.
std::vector<StateVector> conditional_env_states(const CompositeSystem& model,
                                                const analysis::PointerBasis& pointer,
                                                int m, const StateVector& chi,
                                                const TimeGrid& grid);

// Convenience overload that derives the pointer basis itself; throws on
// non-separable interactions (the conditional state is undefined there).
std::vector<StateVector> conditional_env_states(const CompositeSystem& model, int m,
                                                const StateVector& chi,
                                                const TimeGrid& grid);

// z_mm'(t) = <m| rho_S(t) |m'> / (C_m C_m'^*) from the dense evolution.
ZSeries correlation_amplitude_dense(const CompositeSystem& model,
                                    const ProductInitialState& init,
                                    const std::vector<std::pair<int, StateVector>>& pointer_states,
                                    const TimeGrid& grid, int m, int m_prime,
                                    const DynamicsConfig& cfg = {});

// z_mm'(t) = <chi_m'(t) | chi_m(t)> for separable nondemolition models.
ZSeries correlation_amplitude_conditional(const CompositeSystem& model,
                                          const analysis::PointerBasis& pointer,
                                          const StateVector& chi, const TimeGrid& grid,
                                          int m, int m_prime);

// Diagonal spin-bath fast path (H_int = sigma_z (x) sum_k g_k sigma_z^(k),
// H_S = H_E = 0, product environment): z_01(t) as a product of per-particle
// factors, cost O(N * n_samples).
ZSeries factorized_z(const std::vector<double>& g,
                     const std::vector<StateVector>& env_factors, const TimeGrid& grid);

// tr(rho^2) series.
std::vector<double> purity_series(const std::vector<QOperator>& rho);

// Purity reconstructed from correlation amplitudes for rank-1 pointer
// sectors: sum_m |C_m|^4 + sum_{m != m'} |C_m C_m'|^2 |z_mm'|^2.
std::vector<double> purity_from_z(const std::vector<Complex>& amplitudes,
                                  const std::map<std::pair<int, int>, ZSeries>& z,
                                  int n_samples);

} // namespace einselect::dynamics
