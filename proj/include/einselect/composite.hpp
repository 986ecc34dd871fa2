// composite.hpp — System+environment models, product initial states, and the
// uniform time grids every trajectory and estimator runs on.

#pragma once

#include "einselect/linalg.hpp"

#include <vector>

namespace einselect {

struct TimeGrid {
    double t_max{0.0};
    int n_samples{2000};

    TimeGrid() = default;
    TimeGrid(double tmax, int n);

    double dt() const { return t_max / (n_samples - 1); }
    std::vector<double> points() const;
    // first index of the stationary window [t_max/2, t_max]
    int stationary_begin() const;
};

struct CompositeSystem {
    Eigen::Index d_s{0};
    std::vector<Eigen::Index> env_dims; // one entry per environment particle
    QOperator h_s;   // d_s x d_s
    QOperator h_e;   // d_e x d_e
    QOperator h_int; // (d_s*d_e) x (d_s*d_e)

    Eigen::Index d_e() const;
    Eigen::Index total_dim() const { return d_s * d_e(); }

    // H_S (x) I_E + I_S (x) H_E
    QOperator free_hamiltonian() const;
    QOperator total_hamiltonian() const;
    bool free_part_is_zero() const;

    // Validates dimensions and Hermiticity of all three parts.
    static CompositeSystem make(Eigen::Index d_s, std::vector<Eigen::Index> env_dims,
                                QOperator h_s, QOperator h_e, QOperator h_int);
};

struct ProductInitialState {
    StateVector system;                   // amplitudes on d_s
    std::vector<StateVector> env_factors; // per-particle factors, or
    StateVector env_explicit;             // an explicit environment vector

    bool has_factors() const { return !env_factors.empty(); }
    StateVector env_state() const; // kron of factors, or env_explicit
    StateVector full_state() const;

    static ProductInitialState make(StateVector system, std::vector<StateVector> factors);
    static ProductInitialState make_explicit(StateVector system, StateVector env);
};

} // namespace einselect
