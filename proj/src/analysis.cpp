#include "einselect/analysis.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace einselect::analysis {

namespace {

struct Triplet {
    Eigen::Index row;
    Eigen::Index col;
    Complex value;
};

// Sparse form of hermitian_basis(d), same element order. Keeping the two
// constructions in lockstep is covered by a unit test.
std::vector<std::vector<Triplet>> hermitian_basis_triplets(Eigen::Index d) {
    std::vector<std::vector<Triplet>> basis;
    basis.reserve(static_cast<std::size_t>(d * d));
    {
        std::vector<Triplet> id;
        const double v = 1.0 / std::sqrt(static_cast<double>(d));
        for (Eigen::Index j = 0; j < d; ++j) id.push_back({j, j, Complex(v, 0.0)});
        basis.push_back(std::move(id));
    }
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index k = j + 1; k < d; ++k) {
            basis.push_back({{j, k, Complex(inv_sqrt2, 0.0)}, {k, j, Complex(inv_sqrt2, 0.0)}});
            basis.push_back({{j, k, Complex(0.0, -inv_sqrt2)}, {k, j, Complex(0.0, inv_sqrt2)}});
        }
    for (Eigen::Index l = 1; l < d; ++l) {
        std::vector<Triplet> diag;
        const double norm = 1.0 / std::sqrt(static_cast<double>(l * (l + 1)));
        for (Eigen::Index j = 0; j < l; ++j) diag.push_back({j, j, Complex(norm, 0.0)});
        diag.push_back({l, l, Complex(-static_cast<double>(l) * norm, 0.0)});
        basis.push_back(std::move(diag));
    }
    return basis;
}

QOperator dense_from_triplets(const std::vector<Triplet>& t, Eigen::Index d) {
    QOperator m = QOperator::Zero(d, d);
    for (const auto& e : t) m(e.row, e.col) = e.value;
    return m;
}

// Sign gauge for a (A, B) Schmidt pair: flip both so the leading significant
// entry of the system factor is negative. With ascending sector ordering this
// lists sigma_z-type couplings in computational order |0>, |1>.
void canonicalize_pair_sign(QOperator& a, QOperator& b) {
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            const Complex v = a(i, j);
            if (std::abs(v) <= 1e-9) continue;
            const double s =
                std::abs(v.real()) >= std::abs(v.imag()) ? v.real() : v.imag();
            if (s > 0.0) {
                a = -a;
                b = -b;
            }
            return;
        }
}

bool tuple_less(const std::vector<double>& x, const std::vector<double>& y, double tol) {
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (x[k] < y[k] - tol) return true;
        if (x[k] > y[k] + tol) return false;
    }
    return false;
}

} // namespace

QOperator SchmidtDecomposition::reconstruct() const {
    QOperator h = QOperator::Zero(d_s * d_e, d_s * d_e);
    for (std::size_t a = 0; a < weights.size(); ++a)
        h += weights[a] * kron(system_factors[a], env_factors[a]);
    return h;
}

QOperator PointerBasis::reconstruct() const {
    QOperator h = QOperator::Zero(d_s * d_e, d_s * d_e);
    for (std::size_t m = 0; m < system_projectors.size(); ++m)
        for (std::size_t n = 0; n < env_projectors.size(); ++n)
            h += couplings(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) *
                 kron(system_projectors[m], env_projectors[n]);
    return h;
}

std::vector<std::pair<int, StateVector>> PointerBasis::rank_one_states() const {
    std::vector<std::pair<int, StateVector>> states;
    for (std::size_t m = 0; m < system_projectors.size(); ++m) {
        const QOperator& p = system_projectors[m];
        if (std::abs(p.trace().real() - 1.0) > 1e-8) continue;
        // dominant column of a rank-1 projector is proportional to the state
        Eigen::Index best = 0;
        double best_norm = 0.0;
        for (Eigen::Index j = 0; j < p.cols(); ++j) {
            const double nj = p.col(j).norm();
            if (nj > best_norm) {
                best_norm = nj;
                best = j;
            }
        }
        StateVector v = p.col(best) / best_norm;
        for (Eigen::Index r = 0; r < v.size(); ++r)
            if (std::abs(v(r)) > 1e-12) {
                v *= std::conj(v(r)) / std::abs(v(r));
                break;
            }
        states.emplace_back(static_cast<int>(m), std::move(v));
    }
    return states;
}

SchmidtDecomposition operator_schmidt(const QOperator& h_int, Eigen::Index d_s,
                                      Eigen::Index d_e, const AnalysisConfig& cfg) {
    require_hermitian(h_int, "operator_schmidt");
    if (h_int.rows() != d_s * d_e) {
        std::ostringstream msg;
        msg << "operator_schmidt: operator is " << h_int.rows() << "x" << h_int.cols()
            << ", expected " << d_s * d_e << "x" << d_s * d_e << " (d_s=" << d_s
            << " * d_e=" << d_e << ")";
        throw std::invalid_argument(msg.str());
    }

    const auto sys_basis = hermitian_basis_triplets(d_s);
    const auto env_basis = hermitian_basis_triplets(d_e);

    // C[a,b] = tr((G_a (x) F_b) H); real because everything is Hermitian.
    Eigen::MatrixXd coeff(d_s * d_s, d_e * d_e);
    for (std::size_t a = 0; a < sys_basis.size(); ++a)
        for (std::size_t b = 0; b < env_basis.size(); ++b) {
            Complex sum(0.0, 0.0);
            for (const auto& g : sys_basis[a])
                for (const auto& f : env_basis[b])
                    sum += g.value * f.value *
                           h_int(g.col * d_e + f.col, g.row * d_e + f.row);
            coeff(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = sum.real();
        }

    Eigen::BDCSVD<Eigen::MatrixXd> svd(coeff, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sigma = svd.singularValues();

    SchmidtDecomposition out;
    out.d_s = d_s;
    out.d_e = d_e;
    const double sigma_max = sigma.size() ? sigma(0) : 0.0;
    for (Eigen::Index r = 0; r < sigma.size(); ++r) {
        if (sigma(r) <= cfg.weight_cutoff * sigma_max || sigma(r) == 0.0) break;
        QOperator a = QOperator::Zero(d_s, d_s);
        for (std::size_t i = 0; i < sys_basis.size(); ++i) {
            const double u = svd.matrixU()(static_cast<Eigen::Index>(i), r);
            if (u == 0.0) continue;
            for (const auto& t : sys_basis[i]) a(t.row, t.col) += u * t.value;
        }
        QOperator b = QOperator::Zero(d_e, d_e);
        for (std::size_t j = 0; j < env_basis.size(); ++j) {
            const double v = svd.matrixV()(static_cast<Eigen::Index>(j), r);
            if (v == 0.0) continue;
            for (const auto& t : env_basis[j]) b(t.row, t.col) += v * t.value;
        }
        canonicalize_pair_sign(a, b);
        out.weights.push_back(sigma(r));
        out.system_factors.push_back(std::move(a));
        out.env_factors.push_back(std::move(b));
    }
    return out;
}

JointEigenbasis simultaneous_eigenbasis(const std::vector<QOperator>& ops,
                                        Eigen::Index dim, double cluster_tol) {
    JointEigenbasis out;
    out.basis = QOperator::Identity(dim, dim);
    out.sectors.push_back({0, dim, {}});

    for (const auto& op : ops) {
        if (op.rows() != dim || op.cols() != dim)
            throw std::invalid_argument("simultaneous_eigenbasis: dimension mismatch");
        double scale = 0.0;
        std::vector<JointSector> refined;
        std::vector<std::pair<Eigen::Index, Eigen::VectorXd>> block_values;
        for (const auto& sector : out.sectors) {
            auto cols = out.basis.middleCols(sector.begin, sector.size);
            QOperator m = cols.adjoint() * op * cols;
            m = 0.5 * (m + m.adjoint().eval()); // commuting family: off-block parts ~ tol
            const HermEig eig = herm_eig(m);
            out.basis.middleCols(sector.begin, sector.size) = (cols * eig.eigenvectors).eval();
            scale = std::max(scale, eig.eigenvalues.cwiseAbs().maxCoeff());
            block_values.emplace_back(sector.begin, eig.eigenvalues);
        }
        const double tau = cluster_tol * std::max(scale, 1.0);
        std::size_t parent = 0;
        for (const auto& sector : out.sectors) {
            const Eigen::VectorXd& vals = block_values[parent].second;
            Eigen::Index start = 0;
            for (Eigen::Index k = 1; k <= sector.size; ++k) {
                if (k == sector.size || vals(k) - vals(k - 1) > tau) {
                    JointSector child;
                    child.begin = sector.begin + start;
                    child.size = k - start;
                    child.tuple = sector.tuple;
                    child.tuple.push_back(vals.segment(start, k - start).mean());
                    refined.push_back(std::move(child));
                    start = k;
                }
            }
            ++parent;
        }
        out.sectors = std::move(refined);
    }
    return out;
}

SeparabilityVerdict check_separability(const QOperator& h_int, Eigen::Index d_s,
                                       Eigen::Index d_e, const AnalysisConfig& cfg) {
    SeparabilityVerdict verdict;
    verdict.schmidt = operator_schmidt(h_int, d_s, d_e, cfg);
    const auto& sd = verdict.schmidt;

    // Pairwise commutators over all retained factors span-test both families;
    // degenerate weight groups are covered because every pair is tested.
    std::optional<CommutatorWitness> worst;
    auto scan_family = [&](const std::vector<QOperator>& family, bool system_side) {
        for (std::size_t a = 0; a < family.size(); ++a)
            for (std::size_t b = a + 1; b < family.size(); ++b) {
                const double norm = commutator(family[a], family[b]).norm();
                const double bound = cfg.sep_tol * family[a].norm() * family[b].norm();
                if (norm > bound && (!worst || norm > worst->norm))
                    worst = CommutatorWitness{system_side, static_cast<int>(a),
                                              static_cast<int>(b), norm};
            }
    };
    scan_family(sd.system_factors, true);
    scan_family(sd.env_factors, false);

    if (worst) {
        verdict.separable = false;
        verdict.violation = worst;
        return verdict;
    }

    const JointEigenbasis sys_eig =
        simultaneous_eigenbasis(sd.system_factors, d_s, cfg.cluster_tol);
    const JointEigenbasis env_eig =
        simultaneous_eigenbasis(sd.env_factors, d_e, cfg.cluster_tol);

    auto order = [&](const JointEigenbasis& je) {
        std::vector<std::size_t> idx(je.sectors.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
            return tuple_less(je.sectors[x].tuple, je.sectors[y].tuple, cfg.cluster_tol);
        });
        return idx;
    };
    const auto sys_order = order(sys_eig);
    const auto env_order = order(env_eig);

    PointerBasis pb;
    pb.d_s = d_s;
    pb.d_e = d_e;
    for (const auto i : sys_order) {
        const auto& s = sys_eig.sectors[i];
        auto cols = sys_eig.basis.middleCols(s.begin, s.size);
        pb.system_projectors.push_back(cols * cols.adjoint());
    }
    for (const auto j : env_order) {
        const auto& s = env_eig.sectors[j];
        auto cols = env_eig.basis.middleCols(s.begin, s.size);
        pb.env_projectors.push_back(cols * cols.adjoint());
    }
    pb.couplings = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(sys_order.size()),
                                         static_cast<Eigen::Index>(env_order.size()));
    for (std::size_t m = 0; m < sys_order.size(); ++m)
        for (std::size_t n = 0; n < env_order.size(); ++n) {
            double gamma = 0.0;
            for (std::size_t a = 0; a < sd.weights.size(); ++a)
                gamma += sd.weights[a] * sys_eig.sectors[sys_order[m]].tuple[a] *
                         env_eig.sectors[env_order[n]].tuple[a];
            pb.couplings(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) = gamma;
        }

    verdict.separable = true;
    verdict.certificate = std::move(pb);
    return verdict;
}

const PointerBasis& extract_pointer_basis(const SeparabilityVerdict& verdict) {
    if (!verdict.separable || !verdict.certificate) {
        std::ostringstream msg;
        msg << "pointer basis does not exist: interaction is not separable";
        if (verdict.violation) {
            const auto& w = *verdict.violation;
            msg << " (witness: " << (w.system_side ? "system" : "environment")
                << " factors " << w.alpha << "," << w.beta
                << ", ||[A,B]||_F = " << w.norm << ")";
        }
        throw std::runtime_error(msg.str());
    }
    return *verdict.certificate;
}

NondemolitionVerdict check_nondemolition(const CompositeSystem& model,
                                         const std::vector<double>& grid,
                                         const AnalysisConfig& cfg) {
    std::vector<double> times = grid;
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    if (times.size() < 2)
        throw std::invalid_argument("check_nondemolition: need >= 2 distinct times");

    NondemolitionVerdict verdict;
    const double h_norm = model.h_int.norm();
    if (model.free_part_is_zero() || h_norm == 0.0) {
        verdict.pass = true;
        verdict.short_circuited = true;
        return verdict;
    }

    const HermEig free_eig = herm_eig(model.free_hamiltonian());
    const QOperator h_tilde =
        free_eig.eigenvectors.adjoint() * model.h_int * free_eig.eigenvectors;
    const Eigen::Index d = h_tilde.rows();

    auto picture_at = [&](double t) {
        QOperator m(d, d);
        for (Eigen::Index a = 0; a < d; ++a)
            for (Eigen::Index b = 0; b < d; ++b)
                m(a, b) = h_tilde(a, b) *
                          std::exp(Complex(0.0, (free_eig.eigenvalues(a) -
                                                 free_eig.eigenvalues(b)) * t));
        return m;
    };

    std::vector<QOperator> snapshots;
    snapshots.reserve(times.size());
    for (const double t : times) snapshots.push_back(picture_at(t));

    for (std::size_t i = 0; i < times.size(); ++i)
        for (std::size_t j = i + 1; j < times.size(); ++j) {
            const double norm = commutator(snapshots[i], snapshots[j]).norm();
            if (norm > verdict.max_commutator_norm) {
                verdict.max_commutator_norm = norm;
                verdict.t_i = times[i];
                verdict.t_j = times[j];
            }
        }
    verdict.pass = verdict.max_commutator_norm <= cfg.nondem_tol * h_norm * h_norm;
    return verdict;
}

nlohmann::json analysis_report(const SeparabilityVerdict& sep,
                               const NondemolitionVerdict& nondem) {
    nlohmann::json j;
    j["separable"] = sep.separable;
    j["schmidt_rank"] = sep.schmidt.rank();
    j["weights"] = sep.schmidt.weights;
    j["max_commutator_norm"] = nondem.max_commutator_norm;
    j["picture"] = "interaction";
    j["nondemolition"] = nondem.pass;
    if (sep.violation) {
        j["witness"] = {{"side", sep.violation->system_side ? "system" : "environment"},
                        {"alpha", sep.violation->alpha},
                        {"beta", sep.violation->beta},
                        {"commutator_norm", sep.violation->norm}};
    }
    if (sep.certificate) {
        j["pointer_sectors"] = sep.certificate->system_projectors.size();
        j["env_sectors"] = sep.certificate->env_projectors.size();
    }
    return j;
}

} // namespace einselect::analysis
