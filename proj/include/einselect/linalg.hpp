// linalg.hpp — Dense complex operators: Kronecker products, partial trace,
// Hermitian eigendecomposition, unitary propagators, Hilbert-Schmidt bases.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace einselect {

using Complex = std::complex<double>;
using QOperator = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

// --------------------------- Norms and validity -----------------------------

inline double fro_norm(const QOperator& a) { return a.norm(); }

// ||H - H^dag||_F <= rel_tol * ||H||_F
bool is_hermitian(const QOperator& a, double rel_tol = 1e-12);

// ||U^dag U - I||_F <= tol * sqrt(dim)
bool is_unitary(const QOperator& u, double tol = 1e-12);

void require_square(const QOperator& a, const char* what);
void require_hermitian(const QOperator& a, const char* what);

inline QOperator commutator(const QOperator& a, const QOperator& b) {
    return a * b - b * a;
}

// --------------------------- Elementary operators ---------------------------

QOperator identity_op(Eigen::Index d);
QOperator sigma_x();
QOperator sigma_y();
QOperator sigma_z();

StateVector basis_ket(Eigen::Index d, Eigen::Index i);

// --------------------------- Tensor structure -------------------------------

// Row-major block convention: result[(i*db+k),(j*db+l)] = a[i,j]*b[k,l].
QOperator kron(const QOperator& a, const QOperator& b);
StateVector kron(const StateVector& a, const StateVector& b);

// Trace over the second (environment) factor of a d_s*d_e composite:
// result[i,j] = sum_k rho[(i,k),(j,k)].
QOperator partial_trace_env(const QOperator& rho, Eigen::Index d_s, Eigen::Index d_e);

// rho_S of a pure composite state without forming the full density matrix.
QOperator reduced_from_state(const StateVector& psi, Eigen::Index d_s, Eigen::Index d_e);

// --------------------------- Hermitian spectra ------------------------------

struct HermEig {
    Eigen::VectorXd eigenvalues; // ascending
    QOperator eigenvectors;      // orthonormal columns, phase-fixed
};

// Eigenvalues ascending; each eigenvector's first nonzero component is made
// real positive so output is deterministic.
HermEig herm_eig(const QOperator& h);

// U(t) = V diag(exp(-i lambda_k t)) V^dag, hbar = 1.
QOperator evolve_unitary(const QOperator& h, double t);
QOperator evolve_unitary(const HermEig& eig, double t);

// I/sqrt(d) followed by the generalized Gell-Mann matrices, ordered as
// (symmetric, antisymmetric) per index pair (j<k, row-major) and then the
// diagonal elements; tr(G_i G_j) = delta_ij.
std::vector<QOperator> hermitian_basis(Eigen::Index d);

} // namespace einselect
