#include "einselect/composite.hpp"

#include <sstream>
#include <stdexcept>

namespace einselect {

TimeGrid::TimeGrid(double tmax, int n) : t_max(tmax), n_samples(n) {
    if (!(tmax > 0.0)) throw std::invalid_argument("TimeGrid: t_max must be positive");
    if (n < 2) throw std::invalid_argument("TimeGrid: n_samples must be >= 2");
}

std::vector<double> TimeGrid::points() const {
    std::vector<double> t(static_cast<std::size_t>(n_samples));
    const double h = dt();
    for (int i = 0; i < n_samples; ++i) t[static_cast<std::size_t>(i)] = h * i;
    t.back() = t_max;
    return t;
}

int TimeGrid::stationary_begin() const {
    const double h = dt();
    for (int i = 0; i < n_samples; ++i)
        if (h * i >= 0.5 * t_max - 1e-12) return i;
    return n_samples - 1;
}

Eigen::Index CompositeSystem::d_e() const {
    Eigen::Index d = 1;
    for (const auto dk : env_dims) d *= dk;
    return d;
}

QOperator CompositeSystem::free_hamiltonian() const {
    return kron(h_s, identity_op(d_e())) + kron(identity_op(d_s), h_e);
}

QOperator CompositeSystem::total_hamiltonian() const {
    return free_hamiltonian() + h_int;
}

bool CompositeSystem::free_part_is_zero() const {
    return h_s.norm() == 0.0 && h_e.norm() == 0.0;
}

CompositeSystem CompositeSystem::make(Eigen::Index d_s, std::vector<Eigen::Index> env_dims,
                                      QOperator h_s, QOperator h_e, QOperator h_int) {
    CompositeSystem sys;
    sys.d_s = d_s;
    sys.env_dims = std::move(env_dims);
    if (d_s < 1) throw std::invalid_argument("CompositeSystem: d_s must be >= 1");
    if (sys.env_dims.empty())
        throw std::invalid_argument("CompositeSystem: env_dims must be nonempty");
    for (const auto dk : sys.env_dims)
        if (dk < 2) throw std::invalid_argument("CompositeSystem: env dims must be >= 2");
    const Eigen::Index de = sys.d_e();
    if (h_s.rows() != d_s || h_s.cols() != d_s)
        throw std::invalid_argument("CompositeSystem: H_S must be d_s x d_s");
    if (h_e.rows() != de || h_e.cols() != de)
        throw std::invalid_argument("CompositeSystem: H_E must be d_e x d_e");
    if (h_int.rows() != d_s * de || h_int.cols() != d_s * de) {
        std::ostringstream msg;
        msg << "CompositeSystem: H_int is " << h_int.rows() << "x" << h_int.cols()
            << ", expected " << d_s * de << "x" << d_s * de;
        throw std::invalid_argument(msg.str());
    }
    require_hermitian(h_s, "CompositeSystem H_S");
    require_hermitian(h_e, "CompositeSystem H_E");
    require_hermitian(h_int, "CompositeSystem H_int");
    sys.h_s = std::move(h_s);
    sys.h_e = std::move(h_e);
    sys.h_int = std::move(h_int);
    return sys;
}

namespace {

void require_normalized(const StateVector& v, const char* what) {
    if (std::abs(v.squaredNorm() - 1.0) > 1e-12)
        throw std::invalid_argument(std::string(what) + ": state not normalized");
}

} // namespace

StateVector ProductInitialState::env_state() const {
    if (!has_factors()) return env_explicit;
    StateVector chi = env_factors.front();
    for (std::size_t k = 1; k < env_factors.size(); ++k)
        chi = kron(chi, env_factors[k]);
    return chi;
}

StateVector ProductInitialState::full_state() const {
    return kron(system, env_state());
}

ProductInitialState ProductInitialState::make(StateVector system,
                                              std::vector<StateVector> factors) {
    require_normalized(system, "ProductInitialState system");
    if (factors.empty())
        throw std::invalid_argument("ProductInitialState: no environment factors");
    for (const auto& f : factors) require_normalized(f, "ProductInitialState env factor");
    ProductInitialState st;
    st.system = std::move(system);
    st.env_factors = std::move(factors);
    return st;
}

ProductInitialState ProductInitialState::make_explicit(StateVector system, StateVector env) {
    require_normalized(system, "ProductInitialState system");
    require_normalized(env, "ProductInitialState env");
    ProductInitialState st;
    st.system = std::move(system);
    st.env_explicit = std::move(env);
    return st;
}

} // namespace einselect
