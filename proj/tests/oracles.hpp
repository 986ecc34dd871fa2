// oracles.hpp — Test-only reference implementations, kept independent of the
// library code paths they check: explicit index-summation partial trace,
// Taylor-series matrix exponential, closed-form characteristic-polynomial
// roots, a one-pass deviation estimator, and seeded random inputs.

#pragma once

#include "einselect/linalg.hpp"
#include "einselect/rng.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace oracles {

using einselect::Complex;
using einselect::QOperator;
using einselect::StateVector;

// Partial trace by explicit composite-index decode (row = i*d_e + k).
inline QOperator ptrace_env(const QOperator& rho, Eigen::Index d_s, Eigen::Index d_e) {
    QOperator out = QOperator::Zero(d_s, d_s);
    for (Eigen::Index row = 0; row < rho.rows(); ++row)
        for (Eigen::Index col = 0; col < rho.cols(); ++col)
            if (row % d_e == col % d_e) out(row / d_e, col / d_e) += rho(row, col);
    return out;
}

// e^M by scaling-and-squaring Taylor series; independent of any
// eigendecomposition.
inline QOperator expm_taylor(const QOperator& m) {
    const Eigen::Index d = m.rows();
    int squarings = 0;
    double scale = m.cwiseAbs().maxCoeff() * static_cast<double>(d);
    while (scale > 0.5) {
        scale *= 0.5;
        ++squarings;
    }
    const QOperator a = m / std::pow(2.0, squarings);
    QOperator sum = QOperator::Identity(d, d);
    QOperator term = QOperator::Identity(d, d);
    for (int k = 1; k <= 30; ++k) {
        term = (term * a / static_cast<double>(k)).eval();
        sum += term;
        if (term.cwiseAbs().maxCoeff() < 1e-18) break;
    }
    for (int s = 0; s < squarings; ++s) sum = (sum * sum).eval();
    return sum;
}

// Roots of det(H - x I) for Hermitian 2x2 via the quadratic formula.
inline std::vector<double> charpoly_roots_2x2(const QOperator& h) {
    const double tr = h.trace().real();
    const double det = (h(0, 0) * h(1, 1) - h(0, 1) * h(1, 0)).real();
    const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
    return {0.5 * (tr - disc), 0.5 * (tr + disc)};
}

// Roots of the (real) cubic characteristic polynomial of a Hermitian 3x3,
// via the trigonometric method; returned ascending.
inline std::vector<double> charpoly_roots_3x3(const QOperator& h) {
    const double c2 = -h.trace().real();
    double minors = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            minors += (h(i, i) * h(j, j) - h(i, j) * h(j, i)).real();
    const double c1 = minors;
    const double c0 =
        -(h(0, 0) * (h(1, 1) * h(2, 2) - h(1, 2) * h(2, 1)) -
          h(0, 1) * (h(1, 0) * h(2, 2) - h(1, 2) * h(2, 0)) +
          h(0, 2) * (h(1, 0) * h(2, 1) - h(1, 1) * h(2, 0)))
             .real();
    // depressed cubic t^3 + p t + q with x = t - c2/3
    const double shift = c2 / 3.0;
    const double p = c1 - c2 * c2 / 3.0;
    const double q = c0 - c1 * c2 / 3.0 + 2.0 * c2 * c2 * c2 / 27.0;
    std::vector<double> roots;
    if (p >= -1e-30) {
        roots = {-shift, -shift, -shift}; // triple root (Hermitian => p <= 0)
    } else {
        const double m = 2.0 * std::sqrt(-p / 3.0);
        double arg = 3.0 * q / (p * m);
        arg = std::min(1.0, std::max(-1.0, arg));
        const double phi = std::acos(arg) / 3.0;
        for (int k = 0; k < 3; ++k)
            roots.push_back(m * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0) - shift);
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

// One-pass deviation via E|z|^2 - |E z|^2 with trapezoid weights; the library
// implementation is two-pass.
inline double deviation_one_pass(const std::vector<Complex>& z, double dt) {
    if (z.size() < 2) throw std::invalid_argument("deviation_one_pass: need >= 2 samples");
    double total = 0.0, abs2 = 0.0;
    Complex mean(0.0, 0.0);
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double w = (i == 0 || i + 1 == z.size()) ? 0.5 * dt : dt;
        total += w;
        mean += w * z[i];
        abs2 += w * std::norm(z[i]);
    }
    mean /= total;
    return std::sqrt(std::max(0.0, abs2 / total - std::norm(mean)));
}

// --------------------------- Seeded random inputs ---------------------------

inline QOperator random_hermitian(Eigen::Index d, einselect::rng::Stream& stream) {
    QOperator g(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            g(i, j) = Complex(stream.gaussian(), stream.gaussian());
    return 0.5 * (g + g.adjoint().eval());
}

inline QOperator random_density(Eigen::Index d, einselect::rng::Stream& stream) {
    QOperator g(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            g(i, j) = Complex(stream.gaussian(), stream.gaussian());
    QOperator rho = g * g.adjoint();
    return rho / rho.trace().real();
}

inline QOperator haar_unitary(Eigen::Index d, einselect::rng::Stream& stream) {
    QOperator g(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            g(i, j) = Complex(stream.gaussian(), stream.gaussian());
    Eigen::HouseholderQR<QOperator> qr(g);
    QOperator q = qr.householderQ();
    const QOperator r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index k = 0; k < d; ++k) {
        const Complex rkk = r(k, k);
        if (std::abs(rkk) > 0.0) q.col(k) *= rkk / std::abs(rkk);
    }
    return q;
}

inline StateVector random_state(Eigen::Index d, einselect::rng::Stream& stream) {
    StateVector v(d);
    for (Eigen::Index i = 0; i < d; ++i)
        v(i) = Complex(stream.gaussian(), stream.gaussian());
    return v / v.norm();
}

} // namespace oracles
