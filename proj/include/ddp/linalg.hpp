#pragma once

// Dense helpers shared by the subspace and synthesis code. Everything here
// works on Eigen::MatrixXd and tolerates empty (0-row or 0-column) inputs.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "ddp/errors.hpp"

namespace ddp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using Complex = std::complex<double>;
using Spectrum = std::vector<Complex>;

namespace detail {

struct Svd {
    Vector values;
    Matrix U;  // rows x rows
    Matrix V;  // cols x cols
};

inline Svd full_svd(const Matrix& M)
{
    Svd out;
    const Index r = M.rows();
    const Index c = M.cols();
    if (r == 0 || c == 0) {
        out.values = Vector(0);
        out.U = Matrix::Identity(r, r);
        out.V = Matrix::Identity(c, c);
        return out;
    }
    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    out.values = svd.singularValues();
    out.U = svd.matrixU();
    out.V = svd.matrixV();
    return out;
}

inline double spectral_norm(const Matrix& M)
{
    if (M.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(M);
    return svd.singularValues()(0);
}

// Singular values above rank_rel * max(scale, sigma_max) * max(rows, cols).
// `scale` lets callers measure rank against the magnitude of the data that
// produced M (e.g. before a projection), so round-off is not counted as rank.
inline Index numeric_rank(const Vector& sv, double scale, Index rows, Index cols, double rank_rel)
{
    const double smax = sv.size() > 0 ? sv(0) : 0.0;
    const double ref = std::max(scale, smax);
    if (ref <= 0.0) return 0;
    const double thr = rank_rel * ref * static_cast<double>(std::max(rows, cols));
    Index rank = 0;
    for (Index i = 0; i < sv.size(); ++i)
        if (sv(i) > thr) ++rank;
    return rank;
}

inline void require_finite(const Matrix& M, const char* name)
{
    if (!M.allFinite())
        throw Error(ErrorKind::InvalidInput, std::string("non-finite entries in ") + name);
}

/// Orthonormal basis for im M.
inline Matrix range_basis(const Matrix& M, double scale, double rank_rel)
{
    const Svd s = full_svd(M);
    const Index k = numeric_rank(s.values, scale, M.rows(), M.cols(), rank_rel);
    return s.U.leftCols(k);
}

/// Orthonormal basis for ker M.
inline Matrix null_basis(const Matrix& M, double scale, double rank_rel)
{
    const Svd s = full_svd(M);
    const Index k = numeric_rank(s.values, scale, M.rows(), M.cols(), rank_rel);
    return s.V.rightCols(M.cols() - k);
}

/// Orthonormal complement of the span of an orthonormal basis Q.
inline Matrix orth_complement(const Matrix& Q)
{
    const Index n = Q.rows();
    const Index k = Q.cols();
    if (k == 0) return Matrix::Identity(n, n);
    if (k >= n) return Matrix(n, 0);
    Eigen::HouseholderQR<Matrix> qr(Q);
    Matrix full = qr.householderQ() * Matrix::Identity(n, n);
    return full.rightCols(n - k);
}

/// Minimum-norm least-squares solution of M X = R with rank cut-off rank_rel.
inline Matrix lstsq(const Matrix& M, const Matrix& R, double rank_rel)
{
    const Index cols = M.cols();
    if (M.rows() == 0 || cols == 0) return Matrix::Zero(cols, R.cols());
    const Svd s = full_svd(M);
    const Index k = numeric_rank(s.values, 0.0, M.rows(), cols, rank_rel);
    Matrix X = Matrix::Zero(cols, R.cols());
    for (Index i = 0; i < k; ++i)
        X += s.V.col(i) * (s.U.col(i).transpose() * R) / s.values(i);
    return X;
}

inline Matrix vstack(const Matrix& top, const Matrix& bottom)
{
    Matrix out(top.rows() + bottom.rows(), std::max(top.cols(), bottom.cols()));
    if (top.rows() > 0 && bottom.rows() > 0 && top.cols() != bottom.cols())
        throw Error(ErrorKind::DimensionMismatch, "vstack: column counts differ");
    const Index c = top.rows() > 0 ? top.cols() : bottom.cols();
    out.resize(top.rows() + bottom.rows(), c);
    if (top.rows() > 0) out.topRows(top.rows()) = top;
    if (bottom.rows() > 0) out.bottomRows(bottom.rows()) = bottom;
    return out;
}

inline Matrix hstack(const Matrix& left, const Matrix& right)
{
    if (left.cols() > 0 && right.cols() > 0 && left.rows() != right.rows())
        throw Error(ErrorKind::DimensionMismatch, "hstack: row counts differ");
    const Index r = left.cols() > 0 ? left.rows() : right.rows();
    Matrix out(r, left.cols() + right.cols());
    if (left.cols() > 0) out.leftCols(left.cols()) = left;
    if (right.cols() > 0) out.rightCols(right.cols()) = right;
    return out;
}

inline Matrix blkdiag(const Matrix& a, const Matrix& b)
{
    Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    out.topLeftCorner(a.rows(), a.cols()) = a;
    out.bottomRightCorner(b.rows(), b.cols()) = b;
    return out;
}

}  // namespace detail

/// Eigenvalues of a square matrix, ordered by (real, imag) for reproducibility.
inline Spectrum eigenvalues(const Matrix& A)
{
    Spectrum out;
    if (A.rows() == 0) return out;
    Eigen::EigenSolver<Matrix> es(A, false);
    if (es.info() != Eigen::Success) throw Error(ErrorKind::NumericalFailure, "eigenvalue iteration did not converge");
    out.reserve(static_cast<std::size_t>(A.rows()));
    for (Index i = 0; i < A.rows(); ++i) out.push_back(es.eigenvalues()(i));
    std::sort(out.begin(), out.end(), [](const Complex& a, const Complex& b) {
        return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
    });
    return out;
}

namespace detail {

// Replace every eigenvalue by the centroid of its single-linkage cluster.
// Eigenvalues of a defective matrix are only accurate to eps^(1/k) but their
// cluster mean is accurate to eps, so comparing centroids is stable.
inline Spectrum cluster_centroids(const Spectrum& s, double radius)
{
    const std::size_t n = s.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(s[i] - s[j]) <= radius * std::max(1.0, std::abs(s[i]))) parent[find(i)] = find(j);
    std::vector<Complex> sum(n, Complex(0.0, 0.0));
    std::vector<int> count(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        sum[find(i)] += s[i];
        ++count[find(i)];
    }
    Spectrum out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = sum[find(i)] / static_cast<double>(count[find(i)]);
    return out;
}

}  // namespace detail

/// Smallest d such that the two multisets can be matched one-to-one with all
/// pair distances <= d (bottleneck matching). Infinity if sizes differ.
inline double spectrum_distance(const Spectrum& a_in, const Spectrum& b_in, double cluster_radius = 1e-4)
{
    if (a_in.size() != b_in.size()) return std::numeric_limits<double>::infinity();
    const std::size_t n = a_in.size();
    if (n == 0) return 0.0;
    const Spectrum a = detail::cluster_centroids(a_in, cluster_radius);
    const Spectrum b = detail::cluster_centroids(b_in, cluster_radius);

    std::vector<double> cands;
    cands.reserve(n * n);
    for (const auto& x : a)
        for (const auto& y : b) cands.push_back(std::abs(x - y));
    std::sort(cands.begin(), cands.end());

    auto perfect = [&](double d) {
        std::vector<int> match_b(n, -1);
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<char> seen(n, 0);
            // Kuhn augmenting path
            std::vector<std::size_t> stack;
            auto try_kuhn = [&](auto&& self, std::size_t u) -> bool {
                for (std::size_t v = 0; v < n; ++v) {
                    if (seen[v] || std::abs(a[u] - b[v]) > d) continue;
                    seen[v] = 1;
                    if (match_b[v] < 0 || self(self, static_cast<std::size_t>(match_b[v]))) {
                        match_b[v] = static_cast<int>(u);
                        return true;
                    }
                }
                return false;
            };
            if (!try_kuhn(try_kuhn, i)) return false;
        }
        return true;
    };

    std::size_t lo = 0, hi = cands.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (perfect(cands[mid])) hi = mid;
        else lo = mid + 1;
    }
    return cands[lo];
}

inline Spectrum merge_spectra(Spectrum a, const Spectrum& b)
{
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end(), [](const Complex& x, const Complex& y) {
        return x.real() < y.real() || (x.real() == y.real() && x.imag() < y.imag());
    });
    return a;
}

namespace detail {

// Real orthonormal basis of the A-invariant subspace associated with the
// eigenvalues for which `select` holds. `select` must be closed under
// conjugation. Uses a complex Schur form reordered by adjacent Givens swaps.
template <class Pred>
Matrix selected_invariant_subspace(const Matrix& A, Pred select)
{
    const Index n = A.rows();
    if (n == 0) return Matrix(0, 0);
    Eigen::ComplexSchur<Matrix> cs(A, true);
    if (cs.info() != Eigen::Success) throw Error(ErrorKind::NumericalFailure, "Schur iteration did not converge");
    Eigen::MatrixXcd T = cs.matrixT();
    Eigen::MatrixXcd Q = cs.matrixU();

    std::vector<char> sel(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) sel[static_cast<std::size_t>(i)] = select(T(i, i)) ? 1 : 0;

    auto swap_adjacent = [&](Index k) {
        const Complex a = T(k, k);
        const Complex b = T(k + 1, k + 1);
        const Complex t = T(k, k + 1);
        Complex x0 = t;
        Complex x1 = b - a;
        double nrm = std::sqrt(std::norm(x0) + std::norm(x1));
        Eigen::Matrix2cd G;
        if (nrm == 0.0) {
            G << 0.0, 1.0, 1.0, 0.0;
        } else {
            const Complex c = x0 / nrm;
            const Complex s = x1 / nrm;
            G << c, -std::conj(s), s, std::conj(c);
        }
        T.middleRows(k, 2) = (G.adjoint() * T.middleRows(k, 2)).eval();
        T.middleCols(k, 2) = (T.middleCols(k, 2) * G).eval();
        Q.middleCols(k, 2) = (Q.middleCols(k, 2) * G).eval();
        T(k + 1, k) = 0.0;
        std::swap(sel[static_cast<std::size_t>(k)], sel[static_cast<std::size_t>(k + 1)]);
    };

    Index next = 0;
    for (Index i = 0; i < n; ++i) {
        if (!sel[static_cast<std::size_t>(i)]) continue;
        for (Index k = i - 1; k >= next; --k) swap_adjacent(k);
        ++next;
    }
    const Index k = next;
    if (k == 0) return Matrix(n, 0);
    if (k == n) return Matrix::Identity(n, n);
    Matrix stacked(n, 2 * k);
    stacked.leftCols(k) = Q.leftCols(k).real();
    stacked.rightCols(k) = Q.leftCols(k).imag();
    Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeThinU);
    return svd.matrixU().leftCols(k);
}

}  // namespace detail
}  // namespace ddp
