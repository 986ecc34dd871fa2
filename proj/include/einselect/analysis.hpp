// analysis.hpp — Structural analysis of the interaction Hamiltonian: operator
// Schmidt decomposition, the separability test with pointer-basis certificate,
// and the nondemolition (self-commuting in time) check.

#pragma once

#include "einselect/composite.hpp"
#include "einselect/linalg.hpp"

#include <json.hpp>

#include <optional>
#include <vector>

namespace einselect::analysis {

struct AnalysisConfig {
    double sep_tol = 1e-10;       // relative commutator tolerance (condition A)
    double nondem_tol = 1e-9;     // relative commutator tolerance (condition B)
    double weight_cutoff = 1e-12; // Schmidt weights below cutoff*max are dropped
    double cluster_tol = 1e-10;   // joint-eigenvalue clustering width
};

// H = sum_a weights[a] * system_factors[a] (x) env_factors[a], with
// Hilbert-Schmidt-orthonormal Hermitian factors and weights descending.
struct SchmidtDecomposition {
    Eigen::Index d_s{0};
    Eigen::Index d_e{0};
    std::vector<double> weights;
    std::vector<QOperator> system_factors;
    std::vector<QOperator> env_factors;

    int rank() const { return static_cast<int>(weights.size()); }
    QOperator reconstruct() const;
};

// H = sum_{m,n} couplings(m,n) * system_projectors[m] (x) env_projectors[n].
// Sectors are ordered by ascending joint-eigenvalue tuples (lexicographic).
struct PointerBasis {
    Eigen::Index d_s{0};
    Eigen::Index d_e{0};
    std::vector<QOperator> system_projectors;
    std::vector<QOperator> env_projectors;
    Eigen::MatrixXd couplings; // gamma_mn

    QOperator reconstruct() const;
    // Unit vectors of the rank-1 system sectors, keyed by sector label;
    // phase convention: first nonzero component real positive.
    std::vector<std::pair<int, StateVector>> rank_one_states() const;
};

struct CommutatorWitness {
    bool system_side{true};
    int alpha{0};
    int beta{0};
    double norm{0.0}; // ||[A_a, A_b]||_F
};

struct SeparabilityVerdict {
    bool separable{false};
    SchmidtDecomposition schmidt;
    std::optional<PointerBasis> certificate;
    std::optional<CommutatorWitness> violation;
};

struct NondemolitionVerdict {
    bool pass{false};
    double max_commutator_norm{0.0};
    double t_i{0.0};
    double t_j{0.0};
    bool short_circuited{false}; // H_S = H_E = 0
};

// Expand over hermitian_basis(d_s) (x) hermitian_basis(d_e); the real
// coefficient matrix's SVD yields Hermitian factors and nonnegative weights.
SchmidtDecomposition operator_schmidt(const QOperator& h_int, Eigen::Index d_s,
                                      Eigen::Index d_e,
                                      const AnalysisConfig& cfg = {});

// Condition (A): separable iff both Schmidt factor families pairwise commute.
// This decides the existence of a product eigenbasis: commutators are
// bilinear, so pairwise-commuting factors span a commuting algebra on each
// side (degenerate weight groups need no special casing for the same reason);
// simultaneous diagonalization then gives projector families with
// H = sum_mn gamma_mn P_m (x) Pi_n, diagonal in any product basis refining
// the sectors. Conversely, in that form every Schmidt factor lies in
// span{P_m} (resp. span{Pi_n}), which commute.
SeparabilityVerdict check_separability(const QOperator& h_int, Eigen::Index d_s,
                                       Eigen::Index d_e,
                                       const AnalysisConfig& cfg = {});

// Returns the certificate; throws if the verdict is non-separable (the
// pointer basis does not exist).
const PointerBasis& extract_pointer_basis(const SeparabilityVerdict& verdict);

// Condition (B) in the interaction picture: H_int(t) = e^{+iH0 t} H_int
// e^{-iH0 t} with H0 = H_S + H_E; pass iff all grid-pair commutators vanish
// relative to ||H_int||_F^2. Trivially true for H_S = H_E = 0.
NondemolitionVerdict check_nondemolition(const CompositeSystem& model,
                                         const std::vector<double>& grid,
                                         const AnalysisConfig& cfg = {});

// Common orthonormal eigenbasis of a pairwise-commuting Hermitian family,
// with joint-eigenvalue tuples per sector.
struct JointSector {
    Eigen::Index begin{0}; // column range in `basis`
    Eigen::Index size{0};
    std::vector<double> tuple; // one joint eigenvalue per operator
};

struct JointEigenbasis {
    QOperator basis; // unitary, columns grouped by sector
    std::vector<JointSector> sectors;
};

JointEigenbasis simultaneous_eigenbasis(const std::vector<QOperator>& ops,
                                        Eigen::Index dim, double cluster_tol);

// {separable, schmidt_rank, weights, max_commutator_norm, picture} block.
nlohmann::json analysis_report(const SeparabilityVerdict& sep,
                               const NondemolitionVerdict& nondem);

} // namespace einselect::analysis
