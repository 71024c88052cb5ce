#pragma once

#include <string>
#include <vector>

#include "ddp/linalg.hpp"

namespace ddp {

struct ToleranceProfile {
    double rank_rel = 1e-10;   // relative singular value cut-off
    double angle = 1e-8;       // principal angle threshold (sine)
    double residual = 1e-9;    // inclusion / certificate residuals
    double ortho = 1e-12;      // basis orthonormality

    void validate() const
    {
        if (!(rank_rel > 0 && rank_rel < 1 && angle > 0 && residual > 0 && ortho > 0))
            throw Error(ErrorKind::InvalidInput, "tolerances must be positive and rank_rel < 1");
    }
};

enum class RegionKind { continuous, discrete };

struct StabilityRegion {
    RegionKind kind = RegionKind::continuous;
    double margin = 0.0;

    // Signed distance to the (shrunken) boundary; negative inside.
    double boundary_offset(Complex z) const
    {
        if (kind == RegionKind::continuous) return z.real() + margin;
        return std::abs(z) - (1.0 - margin);
    }
    bool contains(Complex z) const { return boundary_offset(z) < 0.0; }
    bool contains_all(const Spectrum& s) const
    {
        for (const auto& z : s)
            if (!contains(z)) return false;
        return true;
    }
};

/// A linear subspace of R^ambient_dim stored by an orthonormal basis.
class Subspace {
public:
    Subspace() = default;

    static Subspace from_orthonormal(Matrix basis)
    {
        Subspace s;
        s.ambient_ = basis.rows();
        s.basis_ = std::move(basis);
        return s;
    }
    static Subspace trivial(Index n) { return from_orthonormal(Matrix(n, 0)); }
    static Subspace full(Index n) { return from_orthonormal(Matrix::Identity(n, n)); }

    Index ambient_dim() const { return ambient_; }
    Index dim() const { return basis_.cols(); }
    const Matrix& basis() const { return basis_; }
    bool is_trivial() const { return dim() == 0; }
    bool is_full() const { return dim() == ambient_; }

    Matrix projector() const { return basis_ * basis_.transpose(); }
    Subspace complement() const { return from_orthonormal(detail::orth_complement(basis_)); }

    double ortho_error() const
    {
        if (dim() == 0) return 0.0;
        return (basis_.transpose() * basis_ - Matrix::Identity(dim(), dim())).norm();
    }

private:
    Index ambient_ = 0;
    Matrix basis_;
};

enum class Relation { contained, contains, equal, incomparable };

inline std::string to_string(Relation r)
{
    switch (r) {
    case Relation::contained: return "contained";
    case Relation::contains: return "contains";
    case Relation::equal: return "equal";
    case Relation::incomparable: return "incomparable";
    }
    return "?";
}

enum class CombineMode { sum, intersect };
enum class HullDirection { smallest_containing, largest_contained };
enum class ExtendedOp { project, intersect };

inline void check_same_ambient(const Subspace& a, const Subspace& b, const char* where)
{
    if (a.ambient_dim() != b.ambient_dim())
        throw Error(ErrorKind::DimensionMismatch, std::string(where) + ": ambient dimensions differ");
}

/// im M. `scale` is an optional reference magnitude for the rank cut-off.
inline Subspace span_of(const Matrix& M, const ToleranceProfile& tol = {}, double scale = 0.0)
{
    detail::require_finite(M, "span_of argument");
    return Subspace::from_orthonormal(detail::range_basis(M, scale, tol.rank_rel));
}

inline Subspace kernel_of(const Matrix& M, const ToleranceProfile& tol = {}, double scale = 0.0)
{
    detail::require_finite(M, "kernel_of argument");
    return Subspace::from_orthonormal(detail::null_basis(M, scale, tol.rank_rel));
}

/// M S
inline Subspace image(const Matrix& M, const Subspace& S, const ToleranceProfile& tol = {})
{
    if (M.cols() != S.ambient_dim()) throw Error(ErrorKind::DimensionMismatch, "image: column count mismatch");
    return span_of(M * S.basis(), tol, detail::spectral_norm(M));
}

inline Subspace sum(const Subspace& a, const Subspace& b, const ToleranceProfile& tol = {})
{
    check_same_ambient(a, b, "sum");
    return span_of(detail::hstack(a.basis(), b.basis()), tol, 1.0);
}

inline Subspace intersect(const Subspace& a, const Subspace& b, const ToleranceProfile& tol = {})
{
    check_same_ambient(a, b, "intersect");
    if (a.is_trivial() || b.is_trivial()) return Subspace::trivial(a.ambient_dim());
    if (a.is_full()) return b;
    if (b.is_full()) return a;
    const Matrix stacked = detail::hstack(a.basis(), -b.basis());
    const Matrix N = detail::null_basis(stacked, 1.0, tol.rank_rel);
    return span_of(a.basis() * N.topRows(a.dim()), tol, 1.0);
}

inline Subspace combine(CombineMode mode, const Subspace& a, const Subspace& b, const ToleranceProfile& tol = {})
{
    return mode == CombineMode::sum ? sum(a, b, tol) : intersect(a, b, tol);
}

/// { x : M x in S }
inline Subspace preimage(const Matrix& M, const Subspace& S, const ToleranceProfile& tol = {})
{
    if (M.rows() != S.ambient_dim()) throw Error(ErrorKind::DimensionMismatch, "preimage: row count mismatch");
    const Matrix perp = detail::orth_complement(S.basis());
    return kernel_of(perp.transpose() * M, tol, detail::spectral_norm(M));
}

/// sin of the largest principal angle between `a` and its projection on `b`
/// (0 when a is inside b).
inline double containment_gap(const Subspace& a, const Subspace& b)
{
    check_same_ambient(a, b, "containment_gap");
    if (a.is_trivial()) return 0.0;
    const Matrix r = a.basis() - b.basis() * (b.basis().transpose() * a.basis());
    return detail::spectral_norm(r);
}

inline bool is_contained(const Subspace& a, const Subspace& b, const ToleranceProfile& tol = {})
{
    return a.dim() <= b.dim() && containment_gap(a, b) <= tol.angle;
}

inline bool is_equal(const Subspace& a, const Subspace& b, const ToleranceProfile& tol = {})
{
    return a.dim() == b.dim() && containment_gap(a, b) <= tol.angle && containment_gap(b, a) <= tol.angle;
}

/// Largest principal angle between equal-dimensional subspaces (sine); 1 if dims differ.
inline double subspace_distance(const Subspace& a, const Subspace& b)
{
    check_same_ambient(a, b, "subspace_distance");
    if (a.dim() != b.dim()) return 1.0;
    return std::max(containment_gap(a, b), containment_gap(b, a));
}

inline Relation relate(const Subspace& a, const Subspace& b, const ToleranceProfile& tol = {})
{
    check_same_ambient(a, b, "relate");
    const bool ab = is_contained(a, b, tol);
    const bool ba = is_contained(b, a, tol);
    if (ab && ba) return Relation::equal;
    if (ab) return Relation::contained;
    if (ba) return Relation::contains;
    return Relation::incomparable;
}

/// Smallest A-invariant subspace containing S (<A|S>), or the largest one
/// contained in S. `steps` receives the number of strict growth steps.
inline Subspace invariant_hull(HullDirection dir, const Matrix& A, const Subspace& S,
                               const ToleranceProfile& tol = {}, int* steps = nullptr)
{
    if (A.rows() != A.cols() || A.rows() != S.ambient_dim())
        throw Error(ErrorKind::DimensionMismatch, "invariant_hull: A must be square and match the subspace");
    if (dir == HullDirection::largest_contained) {
        const Matrix At = A.transpose();
        return invariant_hull(HullDirection::smallest_containing, At, S.complement(), tol, steps).complement();
    }
    Subspace cur = S;
    int count = 0;
    const double scale = std::max(1.0, detail::spectral_norm(A));
    for (;;) {
        Subspace next = span_of(detail::hstack(cur.basis(), A * cur.basis() / scale), tol, 1.0);
        if (next.dim() == cur.dim()) break;
        cur = std::move(next);
        ++count;
    }
    if (steps) *steps = count;
    return cur;
}

/// Largest A-invariant subspace whose induced spectrum lies in `region`.
inline Subspace modal_subspace(const Matrix& A, const StabilityRegion& region, double cluster_tol = 1e-9)
{
    if (A.rows() != A.cols()) throw Error(ErrorKind::DimensionMismatch, "modal_subspace: A must be square");
    detail::require_finite(A, "modal_subspace argument");
    const Spectrum ev = eigenvalues(A);
    Spectrum bad;
    for (const auto& z : ev)
        if (std::abs(region.boundary_offset(z)) <= cluster_tol) bad.push_back(z);
    if (!bad.empty()) throw Error(ErrorKind::BoundarySpectrum, "eigenvalue on the region boundary", 0.0, bad);
    return Subspace::from_orthonormal(
        detail::selected_invariant_subspace(A, [&](Complex z) { return region.contains(z); }));
}

/// Projection onto the first `split` coordinates ({x : exists p, (x,p) in W}).
inline Subspace extended_project(const Subspace& W, Index split, const ToleranceProfile& tol = {})
{
    if (split > W.ambient_dim()) throw Error(ErrorKind::DimensionMismatch, "extended_project: split too large");
    return span_of(W.basis().topRows(split), tol, 1.0);
}

/// Intersection with the first `split` coordinates ({x : (x,0) in W}).
inline Subspace extended_intersect(const Subspace& W, Index split, const ToleranceProfile& tol = {})
{
    if (split > W.ambient_dim()) throw Error(ErrorKind::DimensionMismatch, "extended_intersect: split too large");
    const Index extra = W.ambient_dim() - split;
    const Matrix N = detail::null_basis(W.basis().bottomRows(extra), 1.0, tol.rank_rel);
    return span_of(W.basis().topRows(split) * N, tol, 1.0);
}

inline Subspace extended_ops(ExtendedOp op, const Subspace& W, Index split, const ToleranceProfile& tol = {})
{
    return op == ExtendedOp::project ? extended_project(W, split, tol) : extended_intersect(W, split, tol);
}

/// S (+) 0 in R^{n+extra}
inline Subspace embed(const Subspace& S, Index extra)
{
    Matrix b = Matrix::Zero(S.ambient_dim() + extra, S.dim());
    b.topRows(S.ambient_dim()) = S.basis();
    return Subspace::from_orthonormal(std::move(b));
}

/// S (+) R^extra
inline Subspace embed_full(const Subspace& S, Index extra)
{
    return Subspace::from_orthonormal(detail::blkdiag(S.basis(), Matrix::Identity(extra, extra)));
}

}  // namespace ddp
