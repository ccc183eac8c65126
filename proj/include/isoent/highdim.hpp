// isoent/highdim.hpp
// Constructions in local dimension d: Latin squares, flat (Fourier) Hadamard
// unitaries, robust Hadamard circulants, unitary and non-unitary
// shift-and-multiply bases, vectorization into bipartite states of C^{d^2},
// and conditional product bases.

#pragma once

#include "isoent/families.hpp"
#include "isoent/rng.hpp"

namespace isoent {

// ---------------------------------------------------------------------------
// Latin squares

struct LatinSquare {
    int d = 0;
    std::vector<int> cells;  // row-major, lambda(j, k) = cells[j*d + k]
    int at(int j, int k) const { return cells[j * d + k]; }
};

enum class LatinMethod { Cyclic, Seeded };

inline bool is_latin(const LatinSquare& ls) {
    for (int j = 0; j < ls.d; ++j) {
        std::vector<bool> row(ls.d, false), col(ls.d, false);
        for (int k = 0; k < ls.d; ++k) {
            const int r = ls.at(j, k), c = ls.at(k, j);
            if (r < 0 || r >= ls.d || row[r]) return false;
            if (c < 0 || c >= ls.d || col[c]) return false;
            row[r] = col[c] = true;
        }
    }
    return true;
}

// cyclic: lambda(j,k) = (j+k) mod d; seeded: cyclic square with random row
// and column shuffles plus a symbol relabeling
inline LatinSquare latin_square(int d, LatinMethod method, std::uint64_t seed = 0) {
    if (d < 2) throw std::invalid_argument("latin_square: d must be at least 2");
    LatinSquare ls{d, std::vector<int>(d * d)};
    std::vector<int> rows(d), cols(d), syms(d);
    for (int i = 0; i < d; ++i) rows[i] = cols[i] = syms[i] = i;
    if (method == LatinMethod::Seeded) {
        Rng rng(seed);
        auto shuffle = [&](std::vector<int>& v) {
            for (int i = d - 1; i > 0; --i)
                std::swap(v[i], v[rng.next_u64() % (i + 1)]);
        };
        shuffle(rows);
        shuffle(cols);
        shuffle(syms);
    }
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) ls.cells[j * d + k] = syms[(rows[j] + cols[k]) % d];
    return ls;
}

// ---------------------------------------------------------------------------
// Hadamard-type unitaries

// flat unitary with entries omega^{jk}/sqrt(d) (the Fourier matrix)
inline Mat fourier_hadamard(int d) {
    Mat f(d, d);
    const double r = 1.0 / std::sqrt(static_cast<double>(d));
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) f(j, k) = r * std::polar(1.0, 2.0 * pi * j * k / d);
    return f;
}

struct RobustHadamard {
    int d = 0;
    Mat matrix;    // unitary
    double a = 0;  // squared amplitude of the diagonal entries
    double b = 0;  // squared amplitude of the off-diagonal entries
};

// Circulant unitary with spectrum (1, e^{i chi}, ..., e^{i chi}):
// R = e^{i chi} I + (1 - e^{i chi}) J/d, so |R|^2 is bistochastic with a
// constant diagonal a and constant off-diagonal b, a + (d-1) b = 1. The flat
// profile a = b requires cos(chi) = (2-d)/2, attainable only for d <= 4.
inline RobustHadamard robust_hadamard(int d, double chi) {
    if (d < 2) throw std::invalid_argument("robust_hadamard: d must be at least 2");
    const cplx e = std::polar(1.0, chi);
    RobustHadamard rh;
    rh.d = d;
    rh.matrix = e * Mat::Identity(d, d) + ((1.0 - e) / static_cast<double>(d)) * Mat::Ones(d, d);
    rh.a = std::norm(1.0 + (d - 1.0) * e) / (d * d);
    rh.b = std::norm(1.0 - e) / (d * d);
    return rh;
}

// ---------------------------------------------------------------------------
// shift-and-multiply bases

struct ShiftMultiplyBasis {
    int d = 0;
    std::vector<Mat> ops;  // d^2 operators, index (i, j) -> ops[i*d + j]
    bool unitary_flag = false;
    const Mat& op(int i, int j) const { return ops[i * d + j]; }
};

// X^{ij}|k> carries sqrt(d) (M^j)_{ik} to row lambda(j,k). The mats must be
// unitary; the sqrt(d) scale makes tr(X^dag X') = d delta delta and the
// vectorized columns orthonormal. unitary_flag records the flat-amplitude
// (Hadamard) case, in which the X^{ij} themselves are unitary.
inline ShiftMultiplyBasis shift_multiply(const LatinSquare& ls, const std::vector<Mat>& mats) {
    const int d = ls.d;
    if (static_cast<int>(mats.size()) != d)
        throw std::invalid_argument("shift_multiply: need exactly d matrices");
    bool flat = true;
    for (const Mat& m : mats) {
        if (m.rows() != d || m.cols() != d)
            throw std::invalid_argument("shift_multiply: matrix shape mismatch");
        for (int i = 0; i < d; ++i)
            for (int k = 0; k < d; ++k)
                flat = flat && std::abs(std::norm(m(i, k)) - 1.0 / d) <= 1e-10;
    }
    ShiftMultiplyBasis out;
    out.d = d;
    out.unitary_flag = flat;
    out.ops.reserve(d * d);
    const double scale = std::sqrt(static_cast<double>(d));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            Mat x = Mat::Zero(d, d);
            for (int k = 0; k < d; ++k) x(ls.at(j, k), k) = scale * mats[j](i, k);
            out.ops.push_back(std::move(x));
        }
    return out;
}

// vectorization |X> = (1/sqrt d) sum X_nm |nm>; normalized iff tr(X^dag X)=d,
// Schmidt spectrum = singular values of X/sqrt(d)
inline Vec vectorize(const Mat& x) {
    const int d = static_cast<int>(x.rows());
    Vec v(d * d);
    const double r = 1.0 / std::sqrt(static_cast<double>(d));
    for (int n = 0; n < d; ++n)
        for (int m = 0; m < d; ++m) v(n * d + m) = r * x(n, m);
    return v;
}

// worst pairwise Gram defect of the vectorized shift-and-multiply states
inline double vectorized_gram_residual(const ShiftMultiplyBasis& smb) {
    const int n = smb.d * smb.d;
    double worst = 0;
    for (int p = 0; p < n; ++p) {
        const Vec vp = vectorize(smb.ops[p]);
        for (int q = 0; q < n; ++q) {
            const Vec vq = vectorize(smb.ops[q]);
            const double target = (p == q) ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(std::abs(vp.dot(vq)) - target));
        }
    }
    return worst;
}

// ---------------------------------------------------------------------------
// conditional product bases

// columns |i> (x) u_i |j>, ordered with (i, j) lexicographic; orthonormal for
// arbitrary unitary choices and fully separable
inline Basis conditional_product_basis(const std::vector<Mat>& us) {
    const int d = static_cast<int>(us.size());
    if (d < 2) throw std::invalid_argument("conditional_product_basis: need at least 2 blocks");
    for (const Mat& u : us) {
        if (u.rows() != d || u.cols() != d)
            throw std::invalid_argument("conditional_product_basis: block shape mismatch");
        if (orthonormality_residual(u) > 1e-10)
            throw std::invalid_argument("conditional_product_basis: block not unitary");
    }
    Mat m = Mat::Zero(d * d, d * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            Vec ei = basis_state(d, i);
            Vec uj = us[i] * basis_state(d, j);
            m.col(i * d + j) = kron(ei, uj);
        }
    return make_basis(std::move(m));
}

}  // namespace isoent
