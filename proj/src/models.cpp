#include "einselect/models.hpp"

#include "einselect/matrix_io.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace einselect::models {

ModelKind kind_from_string(const std::string& s) {
    if (s == "spin_bath") return ModelKind::spin_bath;
    if (s == "rotated_spin_bath") return ModelKind::rotated_spin_bath;
    if (s == "nonseparable_xz") return ModelKind::nonseparable_xz;
    if (s == "random_interaction") return ModelKind::random_interaction;
    if (s == "explicit") return ModelKind::explicit_op;
    throw std::invalid_argument("model.kind: unknown kind '" + s + "'");
}

const char* to_string(ModelKind k) {
    switch (k) {
        case ModelKind::spin_bath: return "spin_bath";
        case ModelKind::rotated_spin_bath: return "rotated_spin_bath";
        case ModelKind::nonseparable_xz: return "nonseparable_xz";
        case ModelKind::random_interaction: return "random_interaction";
        case ModelKind::explicit_op: return "explicit";
    }
    return "unknown";
}

EnvStateSpec EnvStateSpec::parse(const nlohmann::json& j) {
    EnvStateSpec spec;
    if (j.is_null()) return spec;
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "balanced") {
            spec.mode = Mode::balanced;
            return spec;
        }
        if (s.rfind("haar:", 0) == 0) {
            spec.mode = Mode::haar;
            try {
                spec.haar_seed = std::stoull(s.substr(5));
            } catch (const std::exception&) {
                throw std::invalid_argument("model.env_state: bad haar seed in '" + s + "'");
            }
            return spec;
        }
        throw std::invalid_argument("model.env_state: expected 'balanced', 'haar:<seed>' "
                                    "or per-particle amplitude arrays, got '" + s + "'");
    }
    if (j.is_array()) {
        spec.mode = Mode::explicit_amps;
        for (const auto& row : j) {
            if (!row.is_array() || row.size() != 4)
                throw std::invalid_argument(
                    "model.env_state: each particle needs [a_re, a_im, b_re, b_im]");
            StateVector v(2);
            v(0) = Complex(row[0].get<double>(), row[1].get<double>());
            v(1) = Complex(row[2].get<double>(), row[3].get<double>());
            const double norm = v.norm();
            if (norm == 0.0)
                throw std::invalid_argument("model.env_state: zero amplitude vector");
            spec.amps.push_back(v / norm);
        }
        return spec;
    }
    throw std::invalid_argument("model.env_state: unsupported JSON type");
}

nlohmann::json EnvStateSpec::to_json() const {
    switch (mode) {
        case Mode::balanced: return "balanced";
        case Mode::haar: return "haar:" + std::to_string(haar_seed);
        case Mode::explicit_amps: {
            nlohmann::json rows = nlohmann::json::array();
            for (const auto& v : amps)
                rows.push_back({v(0).real(), v(0).imag(), v(1).real(), v(1).imag()});
            return rows;
        }
    }
    return nullptr;
}

ModelSpec ModelSpec::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("model: expected a JSON object");
    if (!j.contains("kind")) throw std::invalid_argument("model.kind: missing");
    ModelSpec spec;
    spec.kind = kind_from_string(j.at("kind").get<std::string>());
    if (j.contains("N")) spec.n = j.at("N").get<int>();
    if (j.contains("g")) spec.g = j.at("g").get<std::vector<double>>();
    if (j.contains("h")) spec.h = j.at("h").get<std::vector<double>>();
    if (j.contains("g_range")) {
        const auto& r = j.at("g_range");
        if (!r.is_array() || r.size() != 2)
            throw std::invalid_argument("model.g_range: expected [lo, hi]");
        spec.g_range = {r[0].get<double>(), r[1].get<double>()};
    }
    if (j.contains("theta")) spec.theta = j.at("theta").get<double>();
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("d_s")) spec.d_s = j.at("d_s").get<Eigen::Index>();
    if (j.contains("env_dims"))
        spec.env_dims = j.at("env_dims").get<std::vector<Eigen::Index>>();
    if (j.contains("h_int_file")) spec.h_int_file = j.at("h_int_file").get<std::string>();
    if (j.contains("h_s_file")) spec.h_s_file = j.at("h_s_file").get<std::string>();
    if (j.contains("h_e_file")) spec.h_e_file = j.at("h_e_file").get<std::string>();
    if (j.contains("env_state")) spec.env_state = EnvStateSpec::parse(j.at("env_state"));
    if (j.contains("system_state")) {
        for (const auto& row : j.at("system_state")) {
            if (!row.is_array() || row.size() != 2)
                throw std::invalid_argument("model.system_state: entries must be [re, im]");
            spec.system_amps.emplace_back(row[0].get<double>(), row[1].get<double>());
        }
    }
    if (spec.n < 1) throw std::invalid_argument("model.N: must be >= 1");
    return spec;
}

nlohmann::json ModelSpec::to_json() const {
    nlohmann::json j;
    j["kind"] = to_string(kind);
    j["N"] = n;
    if (!g.empty()) j["g"] = g;
    if (!h.empty()) j["h"] = h;
    if (g_range) j["g_range"] = {g_range->first, g_range->second};
    if (kind == ModelKind::rotated_spin_bath) j["theta"] = theta;
    j["seed"] = seed;
    j["env_state"] = env_state.to_json();
    return j;
}

namespace {

QOperator sum_of_local(int n, const std::vector<double>& coeff, const QOperator& local) {
    const Eigen::Index dim = Eigen::Index(1) << n;
    QOperator out = QOperator::Zero(dim, dim);
    for (int k = 0; k < n; ++k) {
        if (coeff[static_cast<std::size_t>(k)] == 0.0) continue;
        QOperator term = QOperator::Identity(1, 1);
        for (int j = 0; j < n; ++j)
            term = kron(term, j == k ? local : identity_op(2)).eval();
        out += coeff[static_cast<std::size_t>(k)] * term;
    }
    return out;
}

void require_coupling_count(int n, const std::vector<double>& g, const char* what) {
    if (static_cast<int>(g.size()) != n) {
        std::ostringstream msg;
        msg << what << ": expected " << n << " couplings, got " << g.size();
        throw std::invalid_argument(msg.str());
    }
}

} // namespace

QOperator bath_sigma_z_sum(int n, const std::vector<double>& g) {
    require_coupling_count(n, g, "bath_sigma_z_sum");
    return sum_of_local(n, g, sigma_z());
}

QOperator rotation_y(double theta) {
    QOperator r(2, 2);
    r << std::cos(theta / 2.0), -std::sin(theta / 2.0),
         std::sin(theta / 2.0),  std::cos(theta / 2.0);
    return r;
}

CompositeSystem build_spin_bath(int n, const std::vector<double>& g) {
    if (n < 1) throw std::invalid_argument("build_spin_bath: N must be >= 1");
    require_coupling_count(n, g, "build_spin_bath");
    const Eigen::Index d_e = Eigen::Index(1) << n;
    return CompositeSystem::make(2, std::vector<Eigen::Index>(static_cast<std::size_t>(n), 2),
                                 QOperator::Zero(2, 2), QOperator::Zero(d_e, d_e),
                                 kron(sigma_z(), bath_sigma_z_sum(n, g)));
}

CompositeSystem build_rotated_spin_bath(int n, const std::vector<double>& g, double theta) {
    CompositeSystem base = build_spin_bath(n, g);
    const QOperator r = kron(rotation_y(theta), identity_op(base.d_e()));
    base.h_int = (r * base.h_int * r.adjoint()).eval();
    base.h_int = (0.5 * (base.h_int + base.h_int.adjoint().eval())).eval();
    return base;
}

CompositeSystem build_nonseparable_xz(int n, const std::vector<double>& g,
                                      const std::vector<double>& h) {
    if (n < 1) throw std::invalid_argument("build_nonseparable_xz: N must be >= 1");
    require_coupling_count(n, g, "build_nonseparable_xz g");
    require_coupling_count(n, h, "build_nonseparable_xz h");
    const bool g_live = std::any_of(g.begin(), g.end(), [](double x) { return x != 0.0; });
    const bool h_live = std::any_of(h.begin(), h.end(), [](double x) { return x != 0.0; });
    if (!g_live || !h_live)
        throw std::invalid_argument(
            "build_nonseparable_xz: an all-zero coupling leg degenerates to a separable model");
    const Eigen::Index d_e = Eigen::Index(1) << n;
    const QOperator h_int = kron(sigma_x(), sum_of_local(n, g, sigma_z())) +
                            kron(sigma_z(), sum_of_local(n, h, sigma_x()));
    return CompositeSystem::make(2, std::vector<Eigen::Index>(static_cast<std::size_t>(n), 2),
                                 QOperator::Zero(2, 2), QOperator::Zero(d_e, d_e), h_int);
}

CompositeSystem random_interaction(Eigen::Index d_s, const std::vector<Eigen::Index>& env_dims,
                                   std::uint64_t seed) {
    if (d_s < 2) throw std::invalid_argument("random_interaction: d_s must be >= 2");
    if (env_dims.empty())
        throw std::invalid_argument("random_interaction: env_dims must be nonempty");
    Eigen::Index d_e = 1;
    for (const auto d : env_dims) {
        if (d < 2) throw std::invalid_argument("random_interaction: env dims must be >= 2");
        d_e *= d;
    }
    rng::Stream stream(rng::mix64(seed));
    const auto sys_basis = hermitian_basis(d_s);
    const auto env_basis = hermitian_basis(d_e);
    QOperator h = QOperator::Zero(d_s * d_e, d_s * d_e);
    for (const auto& gs : sys_basis)
        for (const auto& fe : env_basis)
            h += stream.gaussian() * kron(gs, fe);
    return CompositeSystem::make(d_s, env_dims, QOperator::Zero(d_s, d_s),
                                 QOperator::Zero(d_e, d_e), std::move(h));
}

StateVector haar_qubit(rng::Stream& stream) {
    const double cos_theta = 1.0 - 2.0 * stream.next_double();
    const double phi = 2.0 * std::numbers::pi * stream.next_double();
    StateVector v(2);
    v(0) = std::sqrt(0.5 * (1.0 + cos_theta));
    v(1) = std::exp(Complex(0.0, phi)) * std::sqrt(0.5 * (1.0 - cos_theta));
    return v;
}

std::vector<StateVector> env_factors(const EnvStateSpec& spec, int n) {
    std::vector<StateVector> factors;
    factors.reserve(static_cast<std::size_t>(n));
    switch (spec.mode) {
        case EnvStateSpec::Mode::balanced: {
            StateVector v(2);
            v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
            factors.assign(static_cast<std::size_t>(n), v);
            break;
        }
        case EnvStateSpec::Mode::haar: {
            rng::Stream stream(rng::mix64(spec.haar_seed));
            for (int k = 0; k < n; ++k) factors.push_back(haar_qubit(stream));
            break;
        }
        case EnvStateSpec::Mode::explicit_amps: {
            if (static_cast<int>(spec.amps.size()) != n)
                throw std::invalid_argument("model.env_state: expected " + std::to_string(n) +
                                            " particle amplitudes, got " +
                                            std::to_string(spec.amps.size()));
            factors = spec.amps;
            break;
        }
    }
    return factors;
}

std::vector<double> couplings_for(const ModelSpec& spec, int n, int seed_index) {
    if (!spec.g.empty()) {
        require_coupling_count(n, spec.g, "model.g");
        return spec.g;
    }
    if (!spec.g_range)
        throw std::invalid_argument("model.g: missing (provide g or g_range)");
    rng::Stream stream = rng::sweep_point_stream(spec.seed, n, seed_index);
    std::vector<double> g(static_cast<std::size_t>(n));
    for (auto& gk : g) gk = stream.uniform(spec.g_range->first, spec.g_range->second);
    return g;
}

namespace {

StateVector system_state_for(const ModelSpec& spec, const QOperator& pointer_frame) {
    if (!spec.system_amps.empty()) {
        if (static_cast<Eigen::Index>(spec.system_amps.size()) != pointer_frame.rows())
            throw std::invalid_argument("model.system_state: wrong amplitude count");
        StateVector v(pointer_frame.rows());
        for (Eigen::Index i = 0; i < v.size(); ++i)
            v(i) = spec.system_amps[static_cast<std::size_t>(i)];
        const double norm = v.norm();
        if (norm == 0.0) throw std::invalid_argument("model.system_state: zero vector");
        return v / norm;
    }
    // balanced superposition of the pointer frame's columns
    StateVector v = StateVector::Zero(pointer_frame.rows());
    for (Eigen::Index m = 0; m < pointer_frame.cols(); ++m) v += pointer_frame.col(m);
    return v / v.norm();
}

} // namespace

BuiltModel build_at(const ModelSpec& spec, int n, int seed_index) {
    switch (spec.kind) {
        case ModelKind::spin_bath: {
            const auto g = couplings_for(spec, n, seed_index);
            CompositeSystem sys = build_spin_bath(n, g);
            auto init = ProductInitialState::make(system_state_for(spec, identity_op(2)),
                                                  env_factors(spec.env_state, n));
            return {std::move(sys), std::move(init)};
        }
        case ModelKind::rotated_spin_bath: {
            const auto g = couplings_for(spec, n, seed_index);
            CompositeSystem sys = build_rotated_spin_bath(n, g, spec.theta);
            auto init = ProductInitialState::make(system_state_for(spec, rotation_y(spec.theta)),
                                                  env_factors(spec.env_state, n));
            return {std::move(sys), std::move(init)};
        }
        case ModelKind::nonseparable_xz: {
            std::vector<double> g = spec.g, h = spec.h;
            if (g.empty() && spec.g_range) {
                rng::Stream stream = rng::sweep_point_stream(spec.seed, n, seed_index);
                g.resize(static_cast<std::size_t>(n));
                h.resize(static_cast<std::size_t>(n));
                for (auto& x : g) x = stream.uniform(spec.g_range->first, spec.g_range->second);
                for (auto& x : h) x = stream.uniform(spec.g_range->first, spec.g_range->second);
            }
            CompositeSystem sys = build_nonseparable_xz(n, g, h);
            auto init = ProductInitialState::make(system_state_for(spec, identity_op(2)),
                                                  env_factors(spec.env_state, n));
            return {std::move(sys), std::move(init)};
        }
        case ModelKind::random_interaction: {
            std::vector<Eigen::Index> dims = spec.env_dims;
            if (dims.empty()) dims.assign(static_cast<std::size_t>(n), 2);
            CompositeSystem sys = random_interaction(spec.d_s, dims, spec.seed);
            for (const auto d : dims)
                if (d != 2)
                    throw std::invalid_argument(
                        "model.env_dims: initial-state factors support qubit particles only");
            auto init = ProductInitialState::make(
                system_state_for(spec, identity_op(spec.d_s)),
                env_factors(spec.env_state, static_cast<int>(dims.size())));
            return {std::move(sys), std::move(init)};
        }
        case ModelKind::explicit_op: {
            if (spec.h_int_file.empty())
                throw std::invalid_argument("model.h_int_file: missing for explicit kind");
            if (spec.env_dims.empty())
                throw std::invalid_argument("model.env_dims: missing for explicit kind");
            QOperator h_int = io::read_matrix_csv(spec.h_int_file);
            Eigen::Index d_e = 1;
            for (const auto d : spec.env_dims) d_e *= d;
            QOperator h_s = spec.h_s_file.empty() ? QOperator::Zero(spec.d_s, spec.d_s)
                                                  : io::read_matrix_csv(spec.h_s_file);
            QOperator h_e = spec.h_e_file.empty() ? QOperator::Zero(d_e, d_e)
                                                  : io::read_matrix_csv(spec.h_e_file);
            CompositeSystem sys = CompositeSystem::make(spec.d_s, spec.env_dims, std::move(h_s),
                                                        std::move(h_e), std::move(h_int));
            bool qubits_only = true;
            for (const auto d : spec.env_dims) qubits_only = qubits_only && d == 2;
            ProductInitialState init =
                qubits_only
                    ? ProductInitialState::make(
                          system_state_for(spec, identity_op(spec.d_s)),
                          env_factors(spec.env_state, static_cast<int>(spec.env_dims.size())))
                    : ProductInitialState::make_explicit(
                          system_state_for(spec, identity_op(spec.d_s)),
                          StateVector::Unit(d_e, 0));
            return {std::move(sys), std::move(init)};
        }
    }
    throw std::logic_error("build_at: unhandled model kind");
}

BuiltModel build(const ModelSpec& spec) { return build_at(spec, spec.n, 0); }

} // namespace einselect::models
