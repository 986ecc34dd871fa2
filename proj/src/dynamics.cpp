#include "einselect/dynamics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace einselect::dynamics {

std::vector<StateVector> evolve_dense(const CompositeSystem& model,
                                      const StateVector& psi0, const TimeGrid& grid,
                                      const DynamicsConfig& cfg) {
    const Eigen::Index dim = model.total_dim();
    if (dim > cfg.dense_cap) {
        std::ostringstream msg;
        msg << "evolve_dense: composite dimension " << dim << " exceeds the dense cap "
            << cfg.dense_cap << "; use the factorized backend";
        throw std::invalid_argument(msg.str());
    }
    if (psi0.size() != dim)
        throw std::invalid_argument("evolve_dense: state dimension mismatch");

    const HermEig eig = herm_eig(model.total_hamiltonian());
    const StateVector w = eig.eigenvectors.adjoint() * psi0;
    const auto times = grid.points();

    std::vector<StateVector> states;
    states.reserve(times.size());
    StateVector phased(dim);
    for (const double t : times) {
        for (Eigen::Index k = 0; k < dim; ++k)
            phased(k) = std::exp(Complex(0.0, -eig.eigenvalues(k) * t)) * w(k);
        states.push_back(eig.eigenvectors * phased);
    }
    return states;
}

std::vector<QOperator> reduced_density(const CompositeSystem& model,
                                       const ProductInitialState& init,
                                       const TimeGrid& grid, const DynamicsConfig& cfg) {
    const auto states = evolve_dense(model, init.full_state(), grid, cfg);
    std::vector<QOperator> rho;
    rho.reserve(states.size());
    for (const auto& psi : states)
        rho.push_back(reduced_from_state(psi, model.d_s, model.d_e()));
    return rho;
}

namespace {

QOperator conditional_env_hamiltonian(const CompositeSystem& model,
                                      const analysis::PointerBasis& pointer, int m) {
    const int sectors = static_cast<int>(pointer.system_projectors.size());
    if (m < 0 || m >= sectors)
        throw std::invalid_argument("conditional_env_states: pointer label out of range");
    const double rank = pointer.system_projectors[static_cast<std::size_t>(m)].trace().real();
    if (std::abs(rank - 1.0) > 1e-8)
        throw std::invalid_argument(
            "conditional_env_states: pointer sector has rank > 1; conditional state "
            "requires a rank-1 sector");
    QOperator h = model.h_e;
    for (std::size_t n = 0; n < pointer.env_projectors.size(); ++n)
        h += pointer.couplings(m, static_cast<Eigen::Index>(n)) * pointer.env_projectors[n];
    return h;
}

} // namespace

std::vector<StateVector> conditional_env_states(const CompositeSystem& model,
                                                const analysis::PointerBasis& pointer,
                                                int m, const StateVector& chi,
                                                const TimeGrid& grid) {
    if (chi.size() != model.d_e())
        throw std::invalid_argument("conditional_env_states: chi dimension mismatch");
    const HermEig eig = herm_eig(conditional_env_hamiltonian(model, pointer, m));
    const StateVector w = eig.eigenvectors.adjoint() * chi;
    const auto times = grid.points();

    std::vector<StateVector> states;
    states.reserve(times.size());
    StateVector phased(chi.size());
    for (const double t : times) {
        for (Eigen::Index k = 0; k < chi.size(); ++k)
            phased(k) = std::exp(Complex(0.0, -eig.eigenvalues(k) * t)) * w(k);
        states.push_back(eig.eigenvectors * phased);
    }
    return states;
}

std::vector<StateVector> conditional_env_states(const CompositeSystem& model, int m,
                                                const StateVector& chi,
                                                const TimeGrid& grid) {
    const auto verdict = analysis::check_separability(model.h_int, model.d_s, model.d_e());
    if (!verdict.separable)
        throw std::runtime_error(
            "conditional_env_states: interaction is not separable; the conditional "
            "environment state is undefined");
    return conditional_env_states(model, *verdict.certificate, m, chi, grid);
}

ZSeries correlation_amplitude_dense(const CompositeSystem& model,
                                    const ProductInitialState& init,
                                    const std::vector<std::pair<int, StateVector>>& pointer_states,
                                    const TimeGrid& grid, int m, int m_prime,
                                    const DynamicsConfig& cfg) {
    const StateVector* ket_m = nullptr;
    const StateVector* ket_mp = nullptr;
    for (const auto& [label, state] : pointer_states) {
        if (label == m) ket_m = &state;
        if (label == m_prime) ket_mp = &state;
    }
    if (!ket_m || !ket_mp)
        throw std::invalid_argument("correlation_amplitude: pointer label has no rank-1 state");

    const Complex c_m = ket_m->dot(init.system);
    const Complex c_mp = ket_mp->dot(init.system);
    if (std::abs(c_m) < 1e-12 || std::abs(c_mp) < 1e-12)
        throw std::invalid_argument(
            "correlation_amplitude: zero pointer amplitude C_m; extract z via the "
            "conditional-state path instead");

    const auto rho = reduced_density(model, init, grid, cfg);
    ZSeries z;
    z.reserve(rho.size());
    const Complex denom = c_m * std::conj(c_mp);
    for (const auto& r : rho)
        z.push_back(ket_m->dot(r * (*ket_mp)) / denom);
    return z;
}

ZSeries correlation_amplitude_conditional(const CompositeSystem& model,
                                          const analysis::PointerBasis& pointer,
                                          const StateVector& chi, const TimeGrid& grid,
                                          int m, int m_prime) {
    const auto chi_m = conditional_env_states(model, pointer, m, chi, grid);
    const auto chi_mp = conditional_env_states(model, pointer, m_prime, chi, grid);
    ZSeries z;
    z.reserve(chi_m.size());
    for (std::size_t i = 0; i < chi_m.size(); ++i)
        z.push_back(chi_mp[i].dot(chi_m[i]));
    return z;
}

ZSeries factorized_z(const std::vector<double>& g,
                     const std::vector<StateVector>& env_factors, const TimeGrid& grid) {
    if (g.size() != env_factors.size())
        throw std::invalid_argument("factorized_z: need one environment factor per coupling");
    std::vector<double> p0(g.size()), p1(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (env_factors[k].size() != 2)
            throw std::invalid_argument("factorized_z: spin-bath environment factors must be qubits");
        p0[k] = std::norm(env_factors[k](0));
        p1[k] = std::norm(env_factors[k](1));
    }
    const auto times = grid.points();
    ZSeries z;
    z.reserve(times.size());
    for (const double t : times) {
        Complex acc(1.0, 0.0);
        for (std::size_t k = 0; k < g.size(); ++k) {
            const double phase = 2.0 * g[k] * t;
            acc *= p0[k] * std::exp(Complex(0.0, -phase)) +
                   p1[k] * std::exp(Complex(0.0, +phase));
        }
        z.push_back(acc);
    }
    return z;
}

std::vector<double> purity_series(const std::vector<QOperator>& rho) {
    std::vector<double> p;
    p.reserve(rho.size());
    for (const auto& r : rho) p.push_back((r * r).trace().real());
    return p;
}

std::vector<double> purity_from_z(const std::vector<Complex>& amplitudes,
                                  const std::map<std::pair<int, int>, ZSeries>& z,
                                  int n_samples) {
    double diag = 0.0;
    for (const auto& c : amplitudes) diag += std::norm(c) * std::norm(c);
    std::vector<double> p(static_cast<std::size_t>(n_samples), diag);
    for (const auto& [pair, series] : z) {
        const double w = std::norm(amplitudes[static_cast<std::size_t>(pair.first)]) *
                         std::norm(amplitudes[static_cast<std::size_t>(pair.second)]);
        for (int i = 0; i < n_samples; ++i)
            p[static_cast<std::size_t>(i)] += 2.0 * w * std::norm(series[static_cast<std::size_t>(i)]);
    }
    return p;
}

} // namespace einselect::dynamics
