// isoent/core.hpp
// Dense complex linear algebra and two-qubit entanglement primitives shared
// by the rest of the library.
//
// Tensor ordering convention (used everywhere, enforced by reshape_bipartite):
// the LEFT factor of a tensor product is the MOST significant index, i.e.
//   kron(a, b)(i*db + k, j*db + l) = a(i, j) * b(k, l).

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace isoent {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline constexpr double pi = std::numbers::pi;

namespace tol {
// Default tolerances: physical assertions vs exact algebraic identities.
inline constexpr double physical = 1e-10;
inline constexpr double algebraic = 1e-12;
inline constexpr double iso_gate = 1e-8;
}  // namespace tol

// ---------------------------------------------------------------------------
// error types

struct SingularConstraint : std::domain_error {
    using std::domain_error::domain_error;
};

struct PhaseInfeasible : std::domain_error {
    using std::domain_error::domain_error;
};

struct NotIsoEntangled : std::domain_error {
    using std::domain_error::domain_error;
};

struct DegenerateSubspace : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonConvergence : std::runtime_error {
    double best_residual;
    NonConvergence(const std::string& what, double best)
        : std::runtime_error(what), best_residual(best) {}
};

// ---------------------------------------------------------------------------
// basic constructions

inline Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline Vec kron(const Vec& a, const Vec& b) {
    Vec out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i)
        out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

// The one shared reshape: psi of dim da*db -> da x db coefficient matrix,
// M(a, b) = psi(a*db + b).
inline Mat reshape_bipartite(const Vec& psi, int da, int db) {
    if (psi.size() != static_cast<Eigen::Index>(da) * db)
        throw std::invalid_argument("reshape_bipartite: dimension mismatch");
    Mat m(da, db);
    for (int a = 0; a < da; ++a)
        for (int b = 0; b < db; ++b) m(a, b) = psi(a * db + b);
    return m;
}

inline Vec basis_state(int dim, int k) {
    Vec v = Vec::Zero(dim);
    v(k) = 1.0;
    return v;
}

inline Mat outer(const Vec& psi) { return psi * psi.adjoint(); }

inline double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

inline Mat pauli_x() {
    Mat s(2, 2);
    s << 0, 1, 1, 0;
    return s;
}

inline Mat pauli_y() {
    Mat s(2, 2);
    s << cplx(0, 0), cplx(0, -1), cplx(0, 1), cplx(0, 0);
    return s;
}

inline Mat pauli_z() {
    Mat s(2, 2);
    s << 1, 0, 0, -1;
    return s;
}

// Bell states. phi_{pm} = (|00> pm |11>)/sqrt2, psi_{pm} = (|01> pm |10>)/sqrt2.
inline Vec bell_phi_plus() {
    Vec v = Vec::Zero(4);
    v(0) = v(3) = 1.0 / std::sqrt(2.0);
    return v;
}

inline Vec bell_phi_minus() {
    Vec v = Vec::Zero(4);
    v(0) = 1.0 / std::sqrt(2.0);
    v(3) = -v(0);
    return v;
}

inline Vec bell_psi_plus() {
    Vec v = Vec::Zero(4);
    v(1) = v(2) = 1.0 / std::sqrt(2.0);
    return v;
}

inline Vec bell_psi_minus() {
    Vec v = Vec::Zero(4);
    v(1) = 1.0 / std::sqrt(2.0);
    v(2) = -v(1);
    return v;
}

// ---------------------------------------------------------------------------
// density-matrix utilities

enum class Subsys { A, B };

inline Mat partial_trace(const Mat& rho, int da, int db, Subsys keep) {
    if (rho.rows() != rho.cols() || rho.rows() != static_cast<Eigen::Index>(da) * db)
        throw std::invalid_argument("partial_trace: dimension mismatch");
    if (keep == Subsys::A) {
        Mat out = Mat::Zero(da, da);
        for (int a = 0; a < da; ++a)
            for (int ap = 0; ap < da; ++ap)
                for (int b = 0; b < db; ++b) out(a, ap) += rho(a * db + b, ap * db + b);
        return out;
    }
    Mat out = Mat::Zero(db, db);
    for (int b = 0; b < db; ++b)
        for (int bp = 0; bp < db; ++bp)
            for (int a = 0; a < da; ++a) out(b, bp) += rho(a * db + b, a * db + bp);
    return out;
}

inline double hermiticity_residual(const Mat& rho) { return max_abs(rho - rho.adjoint()); }

inline std::vector<double> hermitian_eigenvalues(const Mat& h) {
    Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
    std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + h.rows());
    return ev;
}

inline bool is_density_matrix(const Mat& rho, double herm_tol = tol::algebraic,
                              double eig_floor = -1e-10) {
    if (rho.rows() != rho.cols()) return false;
    if (hermiticity_residual(rho) > herm_tol) return false;
    if (std::abs(rho.trace().real() - 1.0) > herm_tol || std::abs(rho.trace().imag()) > herm_tol)
        return false;
    auto ev = hermitian_eigenvalues(0.5 * (rho + Mat(rho.adjoint())));
    return std::all_of(ev.begin(), ev.end(), [&](double e) { return e >= eig_floor; });
}

// ---------------------------------------------------------------------------
// entanglement primitives

// Tangle (squared concurrence) of a two-qubit pure state: 2(1 - Tr rho_A^2).
inline double tangle(const Vec& psi) {
    if (psi.size() != 4) throw std::invalid_argument("tangle: state must have dim 4");
    if (std::abs(psi.squaredNorm() - 1.0) > 1e-8)
        throw std::invalid_argument("tangle: state not normalized");
    Mat m = reshape_bipartite(psi, 2, 2);
    Mat rho_a = m * m.adjoint();
    double purity = (rho_a * rho_a).trace().real();
    double xi = 2.0 * (1.0 - purity);
    return std::clamp(xi, 0.0, 1.0);
}

struct BlochVector {
    double x = 0, y = 0, z = 0;
    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    double dot(const BlochVector& o) const { return x * o.x + y * o.y + z * o.z; }
    BlochVector operator-(const BlochVector& o) const { return {x - o.x, y - o.y, z - o.z}; }
    BlochVector operator+(const BlochVector& o) const { return {x + o.x, y + o.y, z + o.z}; }
    BlochVector cross(const BlochVector& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
};

inline BlochVector bloch_vector(const Mat& rho) {
    if (rho.rows() != 2 || rho.cols() != 2)
        throw std::invalid_argument("bloch_vector: density matrix must be 2x2");
    BlochVector v;
    v.x = 2.0 * rho(0, 1).real();
    v.y = -2.0 * rho(0, 1).imag();
    v.z = (rho(0, 0) - rho(1, 1)).real();
    return v;
}

inline Mat density_from_bloch(const BlochVector& v) {
    Mat rho(2, 2);
    rho(0, 0) = 0.5 * (1.0 + v.z);
    rho(1, 1) = 0.5 * (1.0 - v.z);
    rho(0, 1) = 0.5 * cplx(v.x, -v.y);
    rho(1, 0) = 0.5 * cplx(v.x, v.y);
    return rho;
}

// Schmidt spectrum of a d x d bipartite pure state: singular values of the
// reshaped coefficient matrix, descending (stable, so exact ties keep the
// original index order).
inline std::vector<double> schmidt_spectrum(const Vec& psi, int d) {
    if (psi.size() != static_cast<Eigen::Index>(d) * d)
        throw std::invalid_argument("schmidt_spectrum: non-square bipartition");
    Mat m = reshape_bipartite(psi, d, d);
    Eigen::JacobiSVD<Mat> svd(m);
    std::vector<double> s(svd.singularValues().data(), svd.singularValues().data() + d);
    std::stable_sort(s.begin(), s.end(), std::greater<double>());
    return s;
}

// max-norm of B^dagger B - I
inline double orthonormality_residual(const Mat& b) {
    if (b.rows() != b.cols()) throw std::invalid_argument("orthonormality_residual: square only");
    return max_abs(b.adjoint() * b - Mat::Identity(b.rows(), b.cols()));
}

// Modified Gram-Schmidt with one re-orthogonalization pass; columns that
// collapse to zero are replaced from the identity (keeps the map total).
inline Mat orthonormalize(const Mat& m) {
    Mat q = m;
    const Eigen::Index n = q.cols();
    for (Eigen::Index j = 0; j < n; ++j) {
        for (int pass = 0; pass < 2; ++pass)
            for (Eigen::Index k = 0; k < j; ++k) q.col(j) -= q.col(k).dot(q.col(j)) * q.col(k);
        double nrm = q.col(j).norm();
        if (nrm < 1e-14) {
            q.col(j) = Vec::Zero(q.rows());
            q.col(j)(j % q.rows()) = 1.0;
            for (Eigen::Index k = 0; k < j; ++k) q.col(j) -= q.col(k).dot(q.col(j)) * q.col(k);
            nrm = q.col(j).norm();
        }
        q.col(j) /= nrm;
    }
    return q;
}

// Distance between rays: sqrt(2 - 2|<a|b>|). Zero iff equal up to phase.
inline double projective_distance(const Vec& a, const Vec& b) {
    double ov = std::abs(a.dot(b));
    return std::sqrt(std::max(0.0, 2.0 - 2.0 * ov));
}

// Ray infidelity 1 - |<a|b>|. Unlike the distance above this has no sqrt
// floor at machine precision, so thresholds like 1e-8 are meaningful.
inline double projective_infidelity(const Vec& a, const Vec& b) {
    return std::max(0.0, 1.0 - std::abs(a.dot(b)));
}

// Largest projective column distance between two bases (same column order).
inline double projective_basis_distance(const Mat& a, const Mat& b) {
    double worst = 0;
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        worst = std::max(worst, projective_distance(Vec(a.col(j)), Vec(b.col(j))));
    return worst;
}

inline double projective_basis_infidelity(const Mat& a, const Mat& b) {
    double worst = 0;
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        worst = std::max(worst, projective_infidelity(Vec(a.col(j)), Vec(b.col(j))));
    return worst;
}

// Swap of the two qubit factors on C^4: psi'(2b + a) = psi(2a + b).
inline Mat swap_gate() {
    Mat s = Mat::Zero(4, 4);
    s(0, 0) = s(3, 3) = 1.0;
    s(1, 2) = s(2, 1) = 1.0;
    return s;
}

}  // namespace isoent
