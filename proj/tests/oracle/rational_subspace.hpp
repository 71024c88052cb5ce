#pragma once

// Exact rational reference implementation of the subspace operations.
// Only used by the test suite to cross-check the floating-point code.

#include <cmath>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ddp/geometry.hpp"

namespace oracle {

using Q = boost::multiprecision::cpp_rational;

struct RMat {
    int rows = 0, cols = 0;
    std::vector<Q> a;

    RMat() = default;
    RMat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r * c)) {}

    Q& operator()(int i, int j) { return a[static_cast<std::size_t>(i * cols + j)]; }
    const Q& operator()(int i, int j) const { return a[static_cast<std::size_t>(i * cols + j)]; }

    static RMat identity(int n)
    {
        RMat I(n, n);
        for (int i = 0; i < n; ++i) I(i, i) = 1;
        return I;
    }
};

// Doubles are dyadic rationals, so this conversion is exact.
inline Q exact(double x)
{
    int e = 0;
    const double m = std::frexp(x, &e);
    const auto mant = static_cast<long long>(std::ldexp(m, 53));
    Q r(mant);
    e -= 53;
    Q p2 = 1;
    for (int i = 0; i < std::abs(e); ++i) p2 *= 2;
    return e >= 0 ? Q(r * p2) : Q(r / p2);
}

inline RMat from(const ddp::Matrix& M)
{
    RMat R(static_cast<int>(M.rows()), static_cast<int>(M.cols()));
    for (int i = 0; i < R.rows; ++i)
        for (int j = 0; j < R.cols; ++j) R(i, j) = exact(M(i, j));
    return R;
}

inline ddp::Matrix to_double(const RMat& R)
{
    ddp::Matrix M(R.rows, R.cols);
    for (int i = 0; i < R.rows; ++i)
        for (int j = 0; j < R.cols; ++j) M(i, j) = static_cast<double>(R(i, j));
    return M;
}

inline RMat mul(const RMat& X, const RMat& Y)
{
    RMat Z(X.rows, Y.cols);
    for (int i = 0; i < X.rows; ++i)
        for (int k = 0; k < X.cols; ++k) {
            if (X(i, k) == 0) continue;
            for (int j = 0; j < Y.cols; ++j) Z(i, j) += X(i, k) * Y(k, j);
        }
    return Z;
}

inline RMat transpose(const RMat& X)
{
    RMat T(X.cols, X.rows);
    for (int i = 0; i < X.rows; ++i)
        for (int j = 0; j < X.cols; ++j) T(j, i) = X(i, j);
    return T;
}

inline RMat hcat(const RMat& X, const RMat& Y)
{
    const int r = X.cols > 0 ? X.rows : Y.rows;
    RMat Z(r, X.cols + Y.cols);
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < X.cols; ++j) Z(i, j) = X(i, j);
        for (int j = 0; j < Y.cols; ++j) Z(i, X.cols + j) = Y(i, j);
    }
    return Z;
}

inline RMat vcat(const RMat& X, const RMat& Y)
{
    const int c = X.rows > 0 ? X.cols : Y.cols;
    RMat Z(X.rows + Y.rows, c);
    for (int j = 0; j < c; ++j) {
        for (int i = 0; i < X.rows; ++i) Z(i, j) = X(i, j);
        for (int i = 0; i < Y.rows; ++i) Z(X.rows + i, j) = Y(i, j);
    }
    return Z;
}

inline RMat cols_of(const RMat& X, const std::vector<int>& idx)
{
    RMat Z(X.rows, static_cast<int>(idx.size()));
    for (int i = 0; i < X.rows; ++i)
        for (std::size_t j = 0; j < idx.size(); ++j) Z(i, static_cast<int>(j)) = X(i, idx[j]);
    return Z;
}

/// Reduced row echelon form in place; returns pivot columns.
inline std::vector<int> rref(RMat& M)
{
    std::vector<int> piv;
    int row = 0;
    for (int c = 0; c < M.cols && row < M.rows; ++c) {
        int sel = -1;
        for (int i = row; i < M.rows; ++i)
            if (M(i, c) != 0) {
                sel = i;
                break;
            }
        if (sel < 0) continue;
        for (int j = 0; j < M.cols; ++j) std::swap(M(row, j), M(sel, j));
        const Q inv = 1 / M(row, c);
        for (int j = 0; j < M.cols; ++j) M(row, j) *= inv;
        for (int i = 0; i < M.rows; ++i) {
            if (i == row || M(i, c) == 0) continue;
            const Q f = M(i, c);
            for (int j = 0; j < M.cols; ++j) M(i, j) -= f * M(row, j);
        }
        piv.push_back(c);
        ++row;
    }
    return piv;
}

inline int rank(RMat M) { return static_cast<int>(rref(M).size()); }

/// Column basis (independent columns of M).
inline RMat colspace(const RMat& M)
{
    RMat R = M;
    return cols_of(M, rref(R));
}

inline RMat kernel(const RMat& M)
{
    RMat R = M;
    const auto piv = rref(R);
    std::vector<char> is_piv(static_cast<std::size_t>(M.cols), 0);
    for (int p : piv) is_piv[static_cast<std::size_t>(p)] = 1;
    std::vector<int> free_cols;
    for (int j = 0; j < M.cols; ++j)
        if (!is_piv[static_cast<std::size_t>(j)]) free_cols.push_back(j);
    RMat N(M.cols, static_cast<int>(free_cols.size()));
    for (std::size_t k = 0; k < free_cols.size(); ++k) {
        const int f = free_cols[k];
        N(f, static_cast<int>(k)) = 1;
        for (std::size_t r = 0; r < piv.size(); ++r) N(piv[r], static_cast<int>(k)) = -R(static_cast<int>(r), f);
    }
    return N;
}

inline RMat sum(const RMat& S1, const RMat& S2) { return colspace(hcat(S1, S2)); }

inline RMat intersect(const RMat& S1, const RMat& S2)
{
    if (S1.cols == 0 || S2.cols == 0) return RMat(S1.rows, 0);
    RMat neg = S2;
    for (auto& x : neg.a) x = -x;
    const RMat N = kernel(hcat(S1, neg));
    RMat top(S1.cols, N.cols);
    for (int i = 0; i < S1.cols; ++i)
        for (int j = 0; j < N.cols; ++j) top(i, j) = N(i, j);
    return colspace(mul(S1, top));
}

/// Rows spanning the annihilator of span(S).
inline RMat annihilator(const RMat& S, int ambient)
{
    if (S.cols == 0) return RMat::identity(ambient);
    return transpose(kernel(transpose(S)));
}

inline RMat preimage(const RMat& M, const RMat& S)
{
    const RMat ann = annihilator(S, M.rows);
    if (ann.rows == 0) return RMat::identity(M.cols);
    return kernel(mul(ann, M));
}

inline RMat embed(const RMat& S, int extra)
{
    RMat Z(S.rows + extra, S.cols);
    for (int i = 0; i < S.rows; ++i)
        for (int j = 0; j < S.cols; ++j) Z(i, j) = S(i, j);
    return Z;
}

inline RMat embed_full(const RMat& S, int extra)
{
    RMat Z(S.rows + extra, S.cols + extra);
    for (int i = 0; i < S.rows; ++i)
        for (int j = 0; j < S.cols; ++j) Z(i, j) = S(i, j);
    for (int k = 0; k < extra; ++k) Z(S.rows + k, S.cols + k) = 1;
    return Z;
}

inline RMat smallest_invariant(const RMat& A, const RMat& S)
{
    RMat cur = colspace(S);
    for (;;) {
        RMat next = colspace(hcat(cur, mul(A, cur)));
        if (next.cols == cur.cols) return cur;
        cur = next;
    }
}

/// Largest A-invariant subspace inside S (via the annihilator of the dual hull).
inline RMat largest_invariant(const RMat& A, const RMat& S)
{
    const int n = A.rows;
    const RMat annS = transpose(annihilator(S, n));
    const RMat hull = smallest_invariant(transpose(A), annS);
    return kernel(transpose(hull));
}

struct RQuad {
    RMat A, B, C, D;
    int n() const { return A.rows; }
    int m() const { return B.cols; }
    int p() const { return C.rows; }
};

inline RQuad from(const ddp::Quadruple& q) { return {from(q.A), from(q.B), from(q.C), from(q.D)}; }

inline RMat vstar(const RQuad& q, int* steps = nullptr)
{
    const RMat AC = vcat(q.A, q.C);
    const RMat BD = vcat(q.B, q.D);
    RMat cur = RMat::identity(q.n());
    int count = 0;
    for (;;) {
        RMat next = preimage(AC, sum(embed(cur, q.p()), BD));
        if (next.cols == cur.cols) break;
        cur = next;
        ++count;
    }
    if (steps) *steps = count;
    return cur;
}

inline RMat sstar(const RQuad& q, int* steps = nullptr)
{
    const RMat AB = hcat(q.A, q.B);
    const RMat kerCD = kernel(hcat(q.C, q.D));
    RMat cur(q.n(), 0);
    int count = 0;
    for (;;) {
        RMat next = colspace(mul(AB, intersect(embed_full(cur, q.m()), kerCD)));
        if (next.cols == cur.cols) break;
        cur = next;
        ++count;
    }
    if (steps) *steps = count;
    return cur;
}

/// Orthonormalized floating copy for comparisons with ddp::Subspace.
inline ddp::Subspace to_subspace(const RMat& S, int ambient)
{
    if (S.cols == 0) return ddp::Subspace::trivial(ambient);
    const ddp::Matrix M = to_double(S);
    Eigen::HouseholderQR<ddp::Matrix> qr(M);
    ddp::Matrix Qm = qr.householderQ() * ddp::Matrix::Identity(M.rows(), M.cols());
    return ddp::Subspace::from_orthonormal(Qm);
}

}  // namespace oracle
