#include "einselect/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace einselect {

bool is_hermitian(const QOperator& a, double rel_tol) {
    if (a.rows() != a.cols()) return false;
    return (a - a.adjoint()).norm() <= rel_tol * a.norm();
}

bool is_unitary(const QOperator& u, double tol) {
    if (u.rows() != u.cols()) return false;
    const Eigen::Index d = u.rows();
    return (u.adjoint() * u - QOperator::Identity(d, d)).norm() <=
           tol * std::sqrt(static_cast<double>(d));
}

void require_square(const QOperator& a, const char* what) {
    if (a.rows() != a.cols() || a.rows() == 0) {
        std::ostringstream msg;
        msg << what << ": matrix must be square and nonempty, got "
            << a.rows() << "x" << a.cols();
        throw std::invalid_argument(msg.str());
    }
}

void require_hermitian(const QOperator& a, const char* what) {
    require_square(a, what);
    if (!is_hermitian(a)) {
        std::ostringstream msg;
        msg << what << ": matrix is not Hermitian (||H - H^dag||_F = "
            << (a - a.adjoint()).norm() << ", ||H||_F = " << a.norm() << ")";
        throw std::invalid_argument(msg.str());
    }
}

QOperator identity_op(Eigen::Index d) { return QOperator::Identity(d, d); }

QOperator sigma_x() {
    QOperator m(2, 2);
    m << 0.0, 1.0,
         1.0, 0.0;
    return m;
}

QOperator sigma_y() {
    QOperator m(2, 2);
    m << 0.0, Complex(0.0, -1.0),
         Complex(0.0, 1.0), 0.0;
    return m;
}

QOperator sigma_z() {
    QOperator m(2, 2);
    m << 1.0,  0.0,
         0.0, -1.0;
    return m;
}

StateVector basis_ket(Eigen::Index d, Eigen::Index i) {
    if (i < 0 || i >= d) throw std::out_of_range("basis_ket: index out of range");
    StateVector v = StateVector::Zero(d);
    v(i) = 1.0;
    return v;
}

QOperator kron(const QOperator& a, const QOperator& b) {
    QOperator out(a.rows() * b.rows(), a.cols() * b.cols());
    out = Eigen::kroneckerProduct(a, b);
    return out;
}

StateVector kron(const StateVector& a, const StateVector& b) {
    StateVector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i)
        out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

QOperator partial_trace_env(const QOperator& rho, Eigen::Index d_s, Eigen::Index d_e) {
    if (d_s <= 0 || d_e <= 0)
        throw std::invalid_argument("partial_trace_env: dims must be positive");
    if (rho.rows() != rho.cols() || rho.rows() != d_s * d_e) {
        std::ostringstream msg;
        msg << "partial_trace_env: rho is " << rho.rows() << "x" << rho.cols()
            << ", expected " << d_s * d_e << "x" << d_s * d_e
            << " (d_s=" << d_s << " * d_e=" << d_e << ")";
        throw std::invalid_argument(msg.str());
    }
    QOperator out = QOperator::Zero(d_s, d_s);
    for (Eigen::Index i = 0; i < d_s; ++i)
        for (Eigen::Index j = 0; j < d_s; ++j) {
            Complex sum(0.0, 0.0);
            for (Eigen::Index k = 0; k < d_e; ++k)
                sum += rho(i * d_e + k, j * d_e + k);
            out(i, j) = sum;
        }
    return out;
}

QOperator reduced_from_state(const StateVector& psi, Eigen::Index d_s, Eigen::Index d_e) {
    if (psi.size() != d_s * d_e) {
        std::ostringstream msg;
        msg << "reduced_from_state: state has dim " << psi.size()
            << ", expected " << d_s * d_e << " (d_s=" << d_s << " * d_e=" << d_e << ")";
        throw std::invalid_argument(msg.str());
    }
    // rho_S = Psi Psi^dag with Psi the d_s x d_e amplitude matrix
    Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        amp(psi.data(), d_s, d_e);
    return amp * amp.adjoint();
}

HermEig herm_eig(const QOperator& h) {
    require_hermitian(h, "herm_eig");
    Eigen::SelfAdjointEigenSolver<QOperator> solver(h);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("herm_eig: eigendecomposition failed");
    HermEig out{solver.eigenvalues(), solver.eigenvectors()};
    // phase convention: first nonzero component real positive
    for (Eigen::Index c = 0; c < out.eigenvectors.cols(); ++c) {
        for (Eigen::Index r = 0; r < out.eigenvectors.rows(); ++r) {
            const Complex v = out.eigenvectors(r, c);
            if (std::abs(v) > 1e-12) {
                out.eigenvectors.col(c) *= std::conj(v) / std::abs(v);
                break;
            }
        }
    }
    return out;
}

QOperator evolve_unitary(const HermEig& eig, double t) {
    const Eigen::Index d = eig.eigenvectors.rows();
    StateVector phases(d);
    for (Eigen::Index k = 0; k < d; ++k)
        phases(k) = std::exp(Complex(0.0, -eig.eigenvalues(k) * t));
    return eig.eigenvectors * phases.asDiagonal() * eig.eigenvectors.adjoint();
}

QOperator evolve_unitary(const QOperator& h, double t) {
    return evolve_unitary(herm_eig(h), t);
}

std::vector<QOperator> hermitian_basis(Eigen::Index d) {
    if (d < 1) throw std::invalid_argument("hermitian_basis: d must be >= 1");
    std::vector<QOperator> basis;
    basis.reserve(static_cast<std::size_t>(d * d));
    basis.push_back(QOperator::Identity(d, d) / std::sqrt(static_cast<double>(d)));
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index k = j + 1; k < d; ++k) {
            QOperator sym = QOperator::Zero(d, d);
            sym(j, k) = inv_sqrt2;
            sym(k, j) = inv_sqrt2;
            basis.push_back(sym);
            QOperator asym = QOperator::Zero(d, d);
            asym(j, k) = Complex(0.0, -inv_sqrt2);
            asym(k, j) = Complex(0.0, inv_sqrt2);
            basis.push_back(asym);
        }
    for (Eigen::Index l = 1; l < d; ++l) {
        QOperator diag = QOperator::Zero(d, d);
        const double norm = 1.0 / std::sqrt(static_cast<double>(l * (l + 1)));
        for (Eigen::Index j = 0; j < l; ++j) diag(j, j) = norm;
        diag(l, l) = -static_cast<double>(l) * norm;
        basis.push_back(diag);
    }
    return basis;
}

} // namespace einselect
