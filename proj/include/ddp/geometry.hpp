#pragma once

#include <utility>

#include "ddp/placement.hpp"
#include "ddp/subspace.hpp"

namespace ddp {

struct Quadruple {
    Matrix A, B, C, D;

    Index n() const { return A.rows(); }
    Index m() const { return B.cols(); }
    Index p() const { return C.rows(); }

    void validate() const
    {
        const auto bad = [](const char* what) { throw Error(ErrorKind::DimensionMismatch, what); };
        if (A.rows() != A.cols()) bad("quadruple: A not square");
        if (B.rows() != n()) bad("quadruple: B row count");
        if (C.cols() != n()) bad("quadruple: C column count");
        if (D.rows() != p() || D.cols() != m()) bad("quadruple: D shape");
        detail::require_finite(A, "A");
        detail::require_finite(B, "B");
        detail::require_finite(C, "C");
        detail::require_finite(D, "D");
    }

    Quadruple dual() const { return {A.transpose(), C.transpose(), B.transpose(), D.transpose()}; }
    Matrix AC() const { return detail::vstack(A, C); }
    Matrix BD() const { return detail::vstack(B, D); }
};

struct RecursionResult {
    Subspace limit;
    std::vector<Subspace> sequence;  // V_0, V_1, ... up to the fixpoint
    int strict_steps = 0;             // number of strict dimension changes
};

/// V_0 = X, V_{i+1} = [A;C]^{-1}((V_i (+) 0) + im[B;D]).
inline RecursionResult vstar_sequence(const Quadruple& q, const ToleranceProfile& tol = {})
{
    q.validate();
    RecursionResult out;
    const Matrix AC = q.AC();
    const Subspace imBD = span_of(q.BD(), tol);
    Subspace cur = Subspace::full(q.n());
    out.sequence.push_back(cur);
    for (;;) {
        Subspace next = preimage(AC, sum(embed(cur, q.p()), imBD, tol), tol);
        if (next.dim() == cur.dim()) break;
        cur = std::move(next);
        out.sequence.push_back(cur);
        ++out.strict_steps;
    }
    out.limit = cur;
    return out;
}

/// S_0 = 0, S_{i+1} = [A B]((S_i (+) U) cap ker[C D]).
inline RecursionResult sstar_sequence(const Quadruple& q, const ToleranceProfile& tol = {})
{
    q.validate();
    RecursionResult out;
    const Matrix AB = detail::hstack(q.A, q.B);
    const Subspace kerCD = kernel_of(detail::hstack(q.C, q.D), tol);
    Subspace cur = Subspace::trivial(q.n());
    out.sequence.push_back(cur);
    for (;;) {
        Subspace next = image(AB, intersect(embed_full(cur, q.m()), kerCD, tol), tol);
        if (next.dim() == cur.dim()) break;
        cur = std::move(next);
        out.sequence.push_back(cur);
        ++out.strict_steps;
    }
    out.limit = cur;
    return out;
}

inline Subspace vstar(const Quadruple& q, const ToleranceProfile& tol = {}) { return vstar_sequence(q, tol).limit; }
inline Subspace sstar(const Quadruple& q, const ToleranceProfile& tol = {}) { return sstar_sequence(q, tol).limit; }

/// (R*, Q*) = (V* cap S*, V* + S*)
inline std::pair<Subspace, Subspace> rstar_qstar(const Quadruple& q, const ToleranceProfile& tol = {})
{
    const Subspace V = vstar(q, tol);
    const Subspace S = sstar(q, tol);
    return {intersect(V, S, tol), sum(V, S, tol)};
}

struct InclusionCheck {
    bool ok = false;
    double residual = 0.0;
};

/// [A;C] V inside (V (+) 0) + im[B;D], residual relative to max(1, |[A;C]|).
inline InclusionCheck output_nulling_check(const Subspace& V, const Quadruple& q, const ToleranceProfile& tol = {})
{
    q.validate();
    check_same_ambient(V, Subspace::trivial(q.n()), "output_nulling_check");
    if (V.is_trivial()) return {true, 0.0};
    const Matrix AC = q.AC();
    const Subspace target = sum(embed(V, q.p()), span_of(q.BD(), tol), tol);
    const Matrix img = AC * V.basis();
    const Matrix r = img - target.basis() * (target.basis().transpose() * img);
    const double res = detail::spectral_norm(r) / std::max(1.0, detail::spectral_norm(AC));
    return {res <= tol.residual, res};
}

/// S input containing for q iff its orthogonal complement is output nulling for the dual.
inline InclusionCheck input_containing_check(const Subspace& S, const Quadruple& q, const ToleranceProfile& tol = {})
{
    return output_nulling_check(S.complement(), q.dual(), tol);
}

enum class FriendKind { output_nulling, input_containing };

struct FriendCertificate {
    Matrix matrix;  // F (m x n) or G (n x p)
    FriendKind kind = FriendKind::output_nulling;
    double residual = 0.0;
};

/// Invariance residual of a candidate friend: |(I - P_V)(A+BF)V| and |(C+DF)V|
/// for output nulling; the transposed statement for input containing.
inline double friend_residual(FriendKind kind, const Subspace& X, const Quadruple& q, const Matrix& M)
{
    if (kind == FriendKind::input_containing)
        return friend_residual(FriendKind::output_nulling, X.complement(), q.dual(), M.transpose());
    if (M.rows() != q.m() || M.cols() != q.n()) throw Error(ErrorKind::DimensionMismatch, "friend: shape");
    if (X.is_trivial()) return 0.0;
    const Matrix& V = X.basis();
    const Matrix AV = (q.A + q.B * M) * V;
    const Matrix r1 = AV - V * (V.transpose() * AV);
    const Matrix r2 = (q.C + q.D * M) * V;
    const double scale = std::max(1.0, detail::spectral_norm(detail::vstack(q.A + q.B * M, q.C + q.D * M)));
    return std::max(detail::spectral_norm(r1), detail::spectral_norm(r2)) / scale;
}

inline FriendCertificate friend_of(FriendKind kind, const Subspace& X, const Quadruple& q, const ToleranceProfile& tol = {})
{
    q.validate();
    if (kind == FriendKind::input_containing) {
        FriendCertificate d = friend_of(FriendKind::output_nulling, X.complement(), q.dual(), tol);
        return {d.matrix.transpose(), kind, d.residual};
    }
    check_same_ambient(X, Subspace::trivial(q.n()), "friend");
    FriendCertificate out;
    out.kind = kind;
    out.matrix = Matrix::Zero(q.m(), q.n());
    if (X.is_trivial()) return out;
    const Matrix& V = X.basis();
    const Index k = V.cols();
    // [V B; 0 D] [Xc; W] = [A; C] V
    Matrix lhs = Matrix::Zero(q.n() + q.p(), k + q.m());
    lhs.topLeftCorner(q.n(), k) = V;
    lhs.rightCols(q.m()) = q.BD();
    const Matrix rhs = q.AC() * V;
    const Matrix sol = detail::lstsq(lhs, rhs, tol.rank_rel);
    const double solve_res = detail::spectral_norm(lhs * sol - rhs) / std::max(1.0, detail::spectral_norm(q.AC()));
    if (solve_res > tol.residual)
        throw Error(ErrorKind::NotInvariant, "subspace is not output nulling for the quadruple", solve_res);
    out.matrix = -sol.bottomRows(q.m()) * V.transpose();
    out.residual = friend_residual(kind, X, q, out.matrix);
    return out;
}

/// R_V = <A+BF | V cap B ker D> or Q_S = <S + C^{-1} im D | A+GC>.
inline Subspace reach_detect(FriendKind kind, const Subspace& X, const FriendCertificate& fr, const Quadruple& q,
                             const ToleranceProfile& tol = {})
{
    if (fr.kind != kind) throw Error(ErrorKind::InvalidInput, "reach_detect: friend kind mismatch");
    const double res = friend_residual(kind, X, q, fr.matrix);
    if (res > tol.residual) throw Error(ErrorKind::NotInvariant, "friend does not certify the subspace", res);
    if (kind == FriendKind::output_nulling) {
        const Subspace BkerD = image(q.B, kernel_of(q.D, tol), tol);
        return invariant_hull(HullDirection::smallest_containing, q.A + q.B * fr.matrix, intersect(X, BkerD, tol), tol);
    }
    const Subspace CinvD = preimage(q.C, span_of(q.D, tol), tol);
    return invariant_hull(HullDirection::largest_contained, q.A + fr.matrix * q.C, sum(X, CinvD, tol), tol);
}

enum class SelfKind { bounded, hidden };

inline bool self_predicate(SelfKind kind, const Subspace& X, const Quadruple& q, const ToleranceProfile& tol = {})
{
    if (kind == SelfKind::bounded) {
        const InclusionCheck chk = output_nulling_check(X, q, tol);
        if (!chk.ok) throw Error(ErrorKind::NotInvariant, "self_predicate: not output nulling", chk.residual);
        const Subspace R = rstar_qstar(q, tol).first;
        return is_contained(R, X, tol);
    }
    const InclusionCheck chk = input_containing_check(X, q, tol);
    if (!chk.ok) throw Error(ErrorKind::NotInvariant, "self_predicate: not input containing", chk.residual);
    const Subspace Q = rstar_qstar(q, tol).second;
    return is_contained(X, Q, tol);
}

/// Orthonormal basis of L2 minus L1 (L1 inside L2).
inline Matrix relative_complement(const Subspace& inner, const Subspace& outer)
{
    const Matrix c = outer.basis().transpose() * inner.basis();
    Matrix cc = c;
    if (c.cols() > 0) {
        Eigen::JacobiSVD<Matrix> svd(c, Eigen::ComputeFullU);
        cc = svd.matrixU().leftCols(std::min<Index>(c.cols(), c.rows()));
    }
    return outer.basis() * detail::orth_complement(cc);
}

/// Spectrum of the map induced by M on outer / inner (both M-invariant).
inline Spectrum quotient_spectrum(const Matrix& M, const Subspace& inner, const Subspace& outer)
{
    const Matrix Y = relative_complement(inner, outer);
    return eigenvalues(Y.transpose() * M * Y);
}

namespace detail {

inline FriendCertificate stabilizing_friend_on(const Subspace& X, const Quadruple& q, const StabilityRegion& region,
                                               const ToleranceProfile& tol, bool external, bool shifted)
{
    const FriendCertificate base = friend_of(FriendKind::output_nulling, X, q, tol);
    Matrix F = base.matrix;
    const Index n = q.n();
    const Matrix& V = X.basis();
    if (X.dim() > 0) {
        // inputs that keep V invariant: D u = 0 and B u in V
        const Matrix Vperp = orth_complement(V);
        const Matrix U0 = null_basis(vstack(q.D, Vperp.transpose() * q.B), spectral_norm(q.BD()), tol.rank_rel);
        const Matrix Ai = V.transpose() * (q.A + q.B * F) * V;
        const Matrix Bi = V.transpose() * q.B * U0;
        const PairStabilization inner = stabilize_pair(Ai, Bi, region, tol, shifted);
        Spectrum bad;
        for (const auto& z : inner.uncontrollable)
            if (!region.contains(z)) bad.push_back(z);
        if (!bad.empty())
            throw Error(ErrorKind::FixedSpectrumOutsideRegion, "internal fixed spectrum outside the region", 0.0, bad);
        F += U0 * inner.F * V.transpose();
    }
    if (external && X.dim() < n) {
        const Matrix W = orth_complement(V);
        const Matrix Aq = W.transpose() * (q.A + q.B * F) * W;
        const Matrix Bq = W.transpose() * q.B;
        const PairStabilization outer = stabilize_pair(Aq, Bq, region, tol, shifted);
        Spectrum bad;
        for (const auto& z : outer.uncontrollable)
            if (!region.contains(z)) bad.push_back(z);
        if (!bad.empty()) throw Error(ErrorKind::NotStabilizablePair, "pair (A, B) is not stabilizable", 0.0, bad);
        F += outer.F * W.transpose();
    }
    FriendCertificate out{F, FriendKind::output_nulling, friend_residual(FriendKind::output_nulling, X, q, F)};
    if (out.residual > tol.residual)
        throw Error(ErrorKind::NumericalFailure, "stabilizing friend lost invariance", out.residual);
    return out;
}

}  // namespace detail

/// Friend of the subspace with the internal (and optionally external) assignable
/// spectrum placed in the region. Injection targets are offset from the
/// state-feedback ones so the two closed-loop spectra stay disjoint.
inline FriendCertificate stabilizing_friend(const Subspace& X, FriendKind kind, const Quadruple& q,
                                            const StabilityRegion& region, const ToleranceProfile& tol = {},
                                            bool external = true)
{
    q.validate();
    if (kind == FriendKind::output_nulling) return detail::stabilizing_friend_on(X, q, region, tol, external, false);
    try {
        const FriendCertificate d = detail::stabilizing_friend_on(X.complement(), q.dual(), region, tol, external, true);
        return {d.matrix.transpose(), kind, d.residual};
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::NotStabilizablePair)
            throw Error(ErrorKind::NotStabilizablePair, "pair (C, A) is not detectable", 0.0, e.eigenvalues());
        throw;
    }
}

inline Subspace vstar_g(const Quadruple& q, const StabilityRegion& region, const ToleranceProfile& tol = {})
{
    const Subspace V = vstar(q, tol);
    const Subspace S = sstar(q, tol);
    const Subspace R = intersect(V, S, tol);
    if (R.dim() == V.dim()) return V;
    const FriendCertificate fr = friend_of(FriendKind::output_nulling, V, q, tol);
    const Matrix Y = relative_complement(R, V);
    const Subspace stable = modal_subspace(Y.transpose() * (q.A + q.B * fr.matrix) * Y, region);
    return sum(R, span_of(Y * stable.basis(), tol, 1.0), tol);
}

inline Subspace sstar_g(const Quadruple& q, const StabilityRegion& region, const ToleranceProfile& tol = {})
{
    return vstar_g(q.dual(), region, tol).complement();
}

struct SpectralReport {
    Spectrum internal_fixed;
    Spectrum external_fixed;
    std::pair<Index, Index> assignable_dims{0, 0};
};

/// Fixed spectra of an output-nulling (input-containing) subspace. For the
/// output-nulling case internal = sigma(V / R_V), external = sigma(X / (V+R)).
inline SpectralReport spectral_report(const Subspace& X, FriendKind kind, const Quadruple& q,
                                      const ToleranceProfile& tol = {})
{
    if (kind == FriendKind::input_containing) {
        const SpectralReport d = spectral_report(X.complement(), FriendKind::output_nulling, q.dual(), tol);
        return {d.external_fixed, d.internal_fixed, {d.assignable_dims.second, d.assignable_dims.first}};
    }
    const FriendCertificate fr = friend_of(FriendKind::output_nulling, X, q, tol);
    const Matrix M = q.A + q.B * fr.matrix;
    const Subspace RV = reach_detect(FriendKind::output_nulling, X, fr, q, tol);
    const Subspace reach = invariant_hull(HullDirection::smallest_containing, q.A, span_of(q.B, tol), tol);
    const Subspace VR = sum(X, reach, tol);
    SpectralReport out;
    out.internal_fixed = quotient_spectrum(M, RV, X);
    out.external_fixed = quotient_spectrum(M, VR, Subspace::full(q.n()));
    out.assignable_dims = {RV.dim(), VR.dim() - X.dim()};
    return out;
}

/// sigma(A+BF | V*/R*)
inline Spectrum invariant_zeros(const Quadruple& q, const ToleranceProfile& tol = {})
{
    const Subspace V = vstar(q, tol);
    const Subspace R = intersect(V, sstar(q, tol), tol);
    const FriendCertificate fr = friend_of(FriendKind::output_nulling, V, q, tol);
    return quotient_spectrum(q.A + q.B * fr.matrix, R, V);
}

}  // namespace ddp
