#pragma once

// Pole placement for (A, B) pairs through the Sylvester-equation method and
// a Kalman split into controllable / uncontrollable parts.

#include <limits>

#include "ddp/random.hpp"
#include "ddp/subspace.hpp"

namespace ddp {

/// Eigenvalues handed out by pole placement. `shifted` interleaves a second,
/// disjoint set (used for output injections so that state-feedback and
/// injection targets never coincide).
inline std::vector<double> placement_targets(RegionKind kind, Index count, const Spectrum& avoid, bool shifted)
{
    std::vector<double> out;
    for (int i = 0; static_cast<Index>(out.size()) < count; ++i) {
        double t;
        if (kind == RegionKind::continuous) {
            t = -1.0 - 0.5 * i - (shifted ? 0.25 : 0.0);
        } else {
            t = 0.6 - 0.15 * i - (shifted ? 0.075 : 0.0);
            if (t <= -0.95) throw Error(ErrorKind::NumericalFailure, "ran out of discrete placement targets");
        }
        bool clash = false;
        for (const auto& z : avoid)
            if (std::abs(z - Complex(t, 0.0)) < 1e-3) clash = true;
        if (!clash) out.push_back(t);
    }
    return out;
}

/// F with sigma(A + B F) equal to the given distinct real targets. B must make
/// (A, B) controllable.
inline Matrix place_poles(const Matrix& A, const Matrix& B, const std::vector<double>& targets, std::uint64_t seed = 7)
{
    const Index k = A.rows();
    const Index m = B.cols();
    if (k == 0) return Matrix::Zero(m, 0);
    Matrix lambda = Matrix::Zero(k, k);
    for (Index i = 0; i < k; ++i) lambda(i, i) = targets[static_cast<std::size_t>(i)];

    // A X - X L = -B Gr  <=>  (I (x) A - L^T (x) I) vec X = -vec(B Gr)
    Matrix kron = Matrix::Zero(k * k, k * k);
    for (Index j = 0; j < k; ++j) {
        kron.block(j * k, j * k, k, k) += A;
        kron.block(j * k, j * k, k, k) -= lambda(j, j) * Matrix::Identity(k, k);
    }
    Eigen::PartialPivLU<Matrix> lu(kron);

    Rng rng(seed);
    Matrix best;
    double best_cond = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 12; ++trial) {
        const Matrix Gr = rng.normal_matrix(m, k);
        const Matrix rhs = -(B * Gr);
        const Vector x = lu.solve(Eigen::Map<const Vector>(rhs.data(), rhs.size()));
        const Matrix X = Eigen::Map<const Matrix>(x.data(), k, k);
        Eigen::JacobiSVD<Matrix> svd(X);
        const auto& sv = svd.singularValues();
        const double cond = sv(k - 1) > 0 ? sv(0) / sv(k - 1) : std::numeric_limits<double>::infinity();
        if (cond < best_cond) {
            best_cond = cond;
            best = Gr * X.inverse();
        }
        if (best_cond < 1e3) break;
    }
    if (!std::isfinite(best_cond) || best_cond > 1e12)
        throw Error(ErrorKind::NumericalFailure, "pole placement produced a singular eigenvector matrix");
    return best;
}

struct PairStabilization {
    Matrix F;                 // m x n
    Spectrum uncontrollable;  // spectrum of A on X / <A | im B>
    Index controllable_dim = 0;
};

/// Kalman split of (A, B); controllable modes outside the region, or within
/// 0.1 of its edge, are moved unless everything already lies inside with a
/// safety margin. The uncontrollable
/// spectrum is returned and not checked here.
inline PairStabilization stabilize_pair(const Matrix& A, const Matrix& B, const StabilityRegion& region,
                                        const ToleranceProfile& tol = {}, bool shifted = false,
                                        double safety = 1e-6)
{
    const Index n = A.rows();
    PairStabilization out;
    out.F = Matrix::Zero(B.cols(), n);
    if (n == 0) return out;
    const Subspace reach = invariant_hull(HullDirection::smallest_containing, A,
                                          span_of(B, tol, detail::spectral_norm(A)), tol);
    const Matrix Rc = reach.basis();
    const Matrix Ru = detail::orth_complement(Rc);
    out.controllable_dim = Rc.cols();
    out.uncontrollable = eigenvalues(Ru.transpose() * A * Ru);
    if (Rc.cols() == 0) return out;

    const Matrix A11 = Rc.transpose() * A * Rc;
    const Matrix B1 = Rc.transpose() * B;
    const Spectrum current = eigenvalues(A11);
    bool inside = true;
    for (const auto& z : current)
        if (region.boundary_offset(z) > -safety) inside = false;
    if (inside) return out;

    // only the modes outside (or close to the edge of) the region are moved,
    // through the left invariant subspace that carries them
    const double reach_gap = 0.1;
    const auto bad = [&](Complex z) { return region.boundary_offset(z) > -reach_gap; };
    const Matrix Wu = detail::selected_invariant_subspace(Matrix(A11.transpose()), bad);
    const Matrix Au = Wu.transpose() * A11 * Wu;
    const auto targets = placement_targets(region.kind, Wu.cols(), current, shifted);
    out.F = place_poles(Au, Wu.transpose() * B1, targets) * Wu.transpose() * Rc.transpose();
    return out;
}

}  // namespace ddp
