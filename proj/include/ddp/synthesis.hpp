#pragma once

#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ddp/verify.hpp"

namespace ddp {

/// { K0 + sum theta_i K_i }
struct AffineKFamily {
    Matrix K0;
    std::vector<Matrix> directions;

    Index dim() const { return static_cast<Index>(directions.size()); }
    Matrix member(const Vector& theta) const
    {
        Matrix K = K0;
        for (Index i = 0; i < theta.size(); ++i) K += theta(i) * directions[static_cast<std::size_t>(i)];
        return K;
    }
};

namespace detail {

struct CoupledMaps {
    Matrix At;  // [A H; E G_z]
    Matrix Bt;  // [B; D_z]
    Matrix Ct;  // [C G_y]
};

inline CoupledMaps coupled_maps(const PlantSystem& sys)
{
    return {vstack(hstack(sys.A, sys.H), hstack(sys.E, sys.G_z)), vstack(sys.B, sys.D_z), hstack(sys.C, sys.G_y)};
}

}  // namespace detail

/// Residual of ([A H; E G_z] + [B; D_z] K [C G_y]) (S (+) W) inside V (+) 0.
inline double clk_residual(const PlantSystem& sys, const Subspace& S, const Subspace& V, const Matrix& K)
{
    const auto maps = detail::coupled_maps(sys);
    const Matrix big = maps.At + maps.Bt * K * maps.Ct;
    const Matrix X = embed_full(S, sys.q()).basis();
    const Matrix N = embed(V, sys.r()).basis();
    const Matrix Y = big * X;
    return detail::spectral_norm(Y - N * (N.transpose() * Y)) / std::max(1.0, detail::spectral_norm(big));
}

/// All K with ([A H; E G_z] + [B; D_z] K [C G_y]) (S (+) W) inside V (+) 0, as an affine set.
inline AffineKFamily k_affine_family(const PlantSystem& sys, const Subspace& S, const Subspace& V,
                                     const ToleranceProfile& tol = {})
{
    sys.validate();
    if (S.ambient_dim() != sys.n() || V.ambient_dim() != sys.n())
        throw Error(ErrorKind::DimensionMismatch, "k_affine_family: subspaces must live in the plant state space");
    const auto maps = detail::coupled_maps(sys);
    const Index m = sys.m(), p = sys.p();
    const Matrix Mb = embed_full(S, sys.q()).basis();
    const Matrix Nperp = detail::orth_complement(embed(V, sys.r()).basis());
    const Matrix P = Nperp.transpose() * maps.Bt;  // l x m
    const Matrix Q = maps.Ct * Mb;                 // p x k
    const Matrix R = -(Nperp.transpose() * maps.At * Mb);
    const Index l = P.rows(), k = Q.cols();

    // vec(P K Q) = (Q^T (x) P) vec K
    Matrix L = Matrix::Zero(l * k, m * p);
    for (Index a = 0; a < k; ++a)
        for (Index b = 0; b < p; ++b) L.block(a * l, b * m, l, m) = Q(b, a) * P;
    const Vector rhs = Eigen::Map<const Vector>(R.data(), R.size());

    AffineKFamily fam;
    const Vector x = detail::lstsq(L, rhs, tol.rank_rel);
    const double scale = std::max({1.0, detail::spectral_norm(L) * x.norm(), rhs.norm()});
    const double res = (L * x - rhs).norm() / scale;
    fam.K0 = Eigen::Map<const Matrix>(x.data(), m, p);
    if (res > tol.residual || clk_residual(sys, S, V, fam.K0) > tol.residual)
        throw Error(ErrorKind::NoSolution, "no output feedback K satisfies the coupling inclusion", res);
    const Matrix N = detail::null_basis(L, 0.0, tol.rank_rel);
    for (Index i = 0; i < N.cols(); ++i) fam.directions.push_back(Eigen::Map<const Matrix>(N.col(i).data(), m, p));
    return fam;
}

namespace detail {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Continued-fraction approximation with |x - p/q| <= tol * max(1, |x|).
inline std::optional<Rational> rationalize(double x, double tol = 1e-9, long long max_den = 100000000LL)
{
    if (!std::isfinite(x)) return std::nullopt;
    const bool neg = x < 0;
    double y = std::abs(x);
    BigInt h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double rem = y;
    for (int it = 0; it < 64; ++it) {
        const double a = std::floor(rem);
        if (a > 1e15) break;
        const BigInt ai = static_cast<long long>(a);
        const BigInt h2 = ai * h1 + h0;
        const BigInt k2 = ai * k1 + k0;
        if (k2 > max_den) break;
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        const double approx = static_cast<double>(h1) / static_cast<double>(k1);
        if (std::abs(approx - y) <= tol * std::max(1.0, y)) {
            Rational r(h1, k1);
            return neg ? Rational(-r) : r;
        }
        const double frac = rem - a;
        if (frac <= 0) break;
        rem = 1.0 / frac;
    }
    return std::nullopt;
}

struct RationalMatrix {
    Index rows = 0, cols = 0;
    std::vector<Rational> a;
    Rational& operator()(Index i, Index j) { return a[static_cast<std::size_t>(i * cols + j)]; }
    const Rational& operator()(Index i, Index j) const { return a[static_cast<std::size_t>(i * cols + j)]; }
};

inline std::optional<RationalMatrix> rationalize(const Matrix& M, double tol)
{
    RationalMatrix R{M.rows(), M.cols(), std::vector<Rational>(static_cast<std::size_t>(M.size()))};
    for (Index i = 0; i < M.rows(); ++i)
        for (Index j = 0; j < M.cols(); ++j) {
            const auto v = rationalize(M(i, j), tol);
            if (!v) return std::nullopt;
            R(i, j) = *v;
        }
    return R;
}

inline Rational exact_det(std::vector<std::vector<Rational>> M)
{
    const std::size_t n = M.size();
    Rational det = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = n;
        for (std::size_t r = c; r < n; ++r)
            if (M[r][c] != 0) {
                piv = r;
                break;
            }
        if (piv == n) return 0;
        if (piv != c) {
            std::swap(M[piv], M[c]);
            det = -det;
        }
        det *= M[c][c];
        for (std::size_t r = c + 1; r < n; ++r) {
            if (M[r][c] == 0) continue;
            const Rational f = M[r][c] / M[c][c];
            for (std::size_t j = c; j < n; ++j) M[r][j] -= f * M[c][j];
        }
    }
    return det;
}

/// Row-reduce the direction vectors (as rows) so that the rational
/// reconstruction sees a canonical, typically integer, basis; K0 is reduced
/// against the pivots.
inline void canonicalize_family(Matrix& dirs /* d x mp */, Vector& k0)
{
    const Index d = dirs.rows(), w = dirs.cols();
    Index row = 0;
    std::vector<Index> pivots;
    for (Index c = 0; c < w && row < d; ++c) {
        Index best = row;
        for (Index r = row; r < d; ++r)
            if (std::abs(dirs(r, c)) > std::abs(dirs(best, c))) best = r;
        if (std::abs(dirs(best, c)) < 1e-9) continue;
        dirs.row(row).swap(dirs.row(best));
        dirs.row(row) /= dirs(row, c);
        for (Index r = 0; r < d; ++r)
            if (r != row) dirs.row(r) -= dirs(r, c) * dirs.row(row);
        pivots.push_back(c);
        ++row;
    }
    for (std::size_t i = 0; i < pivots.size(); ++i) {
        const Index r = static_cast<Index>(i);
        k0 -= k0(pivots[i]) * dirs.row(r).transpose();
    }
}

}  // namespace detail

struct WellposedSelection {
    Matrix K;
    bool exact_grid_used = false;
    long grid_points = 0;
};

/// Deterministic search for a member with I + K D_y safely invertible:
/// K0, then each direction at unit step, then `trials` seeded combinations.
/// When all of those are singular, det(I + K(theta) D_y) is evaluated exactly
/// on a rational grid; AllSingular is raised only if it vanishes everywhere.
inline WellposedSelection select_wellposed_detail(const AffineKFamily& fam, const Matrix& D_y, int trials = 64,
                                                  std::uint64_t seed = 1)
{
    const Index m = fam.K0.rows(), p = fam.K0.cols();
    if (D_y.rows() != p || D_y.cols() != m) throw Error(ErrorKind::DimensionMismatch, "select_wellposed: D_y shape");
    auto good = [&](const Matrix& K) { return is_wellposed(K * D_y); };
    if (good(fam.K0)) return {fam.K0};
    for (const auto& Dk : fam.directions)
        if (good(fam.K0 + Dk)) return {fam.K0 + Dk};
    Rng rng(seed);
    for (int t = 0; t < trials && fam.dim() > 0; ++t) {
        Vector theta(fam.dim());
        for (Index i = 0; i < theta.size(); ++i) theta(i) = rng.normal();
        const Matrix K = fam.member(theta);
        if (good(K)) return {K};
    }

    // exact confirmation
    const Index d = fam.dim();
    Matrix dirs(d, m * p);
    for (Index i = 0; i < d; ++i)
        dirs.row(i) = Eigen::Map<const Vector>(fam.directions[static_cast<std::size_t>(i)].data(), m * p).transpose();
    Vector k0 = Eigen::Map<const Vector>(fam.K0.data(), m * p);
    detail::canonicalize_family(dirs, k0);
    const auto rdirs = detail::rationalize(dirs, 1e-9);
    const auto rk0 = detail::rationalize(Matrix(k0.transpose()), 1e-9);
    const auto rDy = detail::rationalize(D_y, 1e-12);
    if (!rdirs || !rk0 || !rDy)
        throw Error(ErrorKind::NumericalFailure, "no well-posed member found and the family has no rational reconstruction");

    using detail::Rational;
    auto kentry = [&](const std::vector<Rational>& th, Index i, Index j) {
        const Index idx = i + j * m;  // column-major vec
        Rational v = (*rk0)(0, idx);
        for (Index t = 0; t < d; ++t) v += th[static_cast<std::size_t>(t)] * (*rdirs)(t, idx);
        return v;
    };
    auto det_at = [&](const std::vector<Rational>& th) {
        std::vector<std::vector<Rational>> M(static_cast<std::size_t>(m), std::vector<Rational>(static_cast<std::size_t>(m)));
        for (Index i = 0; i < m; ++i)
            for (Index j = 0; j < m; ++j) {
                Rational s = (i == j) ? 1 : 0;
                for (Index k = 0; k < p; ++k) s += kentry(th, i, k) * (*rDy)(k, j);
                M[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = s;
            }
        return detail::exact_det(M);
    };
    auto to_matrix = [&](const std::vector<Rational>& th) {
        Matrix K(m, p);
        for (Index i = 0; i < m; ++i)
            for (Index j = 0; j < p; ++j) K(i, j) = static_cast<double>(kentry(th, i, j));
        return K;
    };

    // per-variable degree of the determinant is at most m
    const long g = std::max<long>(d + 2, m + 1);
    double total = 1.0;
    for (Index i = 0; i < d; ++i) total *= static_cast<double>(g);
    WellposedSelection sel;
    sel.exact_grid_used = true;
    bool nonzero_seen = false;
    auto visit = [&](const std::vector<Rational>& th) -> bool {
        ++sel.grid_points;
        if (det_at(th) == 0) return false;
        nonzero_seen = true;
        const Matrix K = to_matrix(th);
        if (!good(K)) return false;
        sel.K = K;
        return true;
    };
    std::vector<Rational> th(static_cast<std::size_t>(d), Rational(0));
    if (total <= 20000.0) {
        std::vector<long> idx(static_cast<std::size_t>(d), 0);
        for (;;) {
            for (Index i = 0; i < d; ++i) th[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i)];
            if (visit(th)) return sel;
            Index k = 0;
            while (k < d && ++idx[static_cast<std::size_t>(k)] == g) idx[static_cast<std::size_t>(k++)] = 0;
            if (k == d) break;
        }
    } else {
        // too many grid points: random integer points (a nonzero polynomial of
        // total degree <= m vanishes at a uniform point with probability <= m / 2e6)
        Rng prng(seed ^ 0x9e3779b97f4a7c15ULL);
        for (int t = 0; t < 512; ++t) {
            for (Index i = 0; i < d; ++i) th[static_cast<std::size_t>(i)] = prng.integer(-1000000, 1000000);
            if (visit(th)) return sel;
        }
    }
    if (nonzero_seen)
        throw Error(ErrorKind::NumericalFailure, "well-posed members exist but none clears the determinant margin");
    throw Error(ErrorKind::AllSingular, "det(I + K D_y) vanishes identically on the family");
}

inline Matrix select_wellposed(const AffineKFamily& fam, const Matrix& D_y, int trials = 64, std::uint64_t seed = 1)
{
    return select_wellposed_detail(fam, D_y, trials, seed).K;
}

enum class ProblemKind { p1, p2 };
enum class Verdict { solvable, infeasible, well_posedness_obstruction };

inline std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::solvable: return "solvable";
    case Verdict::infeasible: return "infeasible";
    case Verdict::well_posedness_obstruction: return "well_posedness_obstruction";
    }
    return "?";
}

struct ConditionResult {
    std::string label;
    CheckStatus status = CheckStatus::skipped;
    double residual = 0.0;
    std::string note;
    bool passed() const { return status == CheckStatus::pass || status == CheckStatus::marginal; }
};

struct FeasibilityReport {
    ProblemKind problem = ProblemKind::p1;
    Verdict overall = Verdict::infeasible;
    std::string failed_condition;
    std::vector<ConditionResult> conditions;
    Subspace V, S;                       // pair used for synthesis
    Subspace V_star, S_star;             // V*(A,B,E,D_z), S*(A,H,C,G_y)
    std::optional<AffineKFamily> family; // family on (S*, V*)
    std::optional<Matrix> K;
    std::optional<bool> alternative_route_agrees;  // stabilizing case: V*_g / S*_g route
    std::string alternative_route_note;

    const ConditionResult* find(const std::string& label) const
    {
        for (const auto& c : conditions)
            if (c.label == label) return &c;
        return nullptr;
    }
};

struct AnalyzeOptions {
    ToleranceProfile tol;
    int trials = 64;
    std::uint64_t seed = 1;
};

namespace detail {

inline ConditionResult from_check(const std::string& label, const InclusionCheck& c)
{
    return {label, c.ok ? CheckStatus::pass : CheckStatus::fail, c.residual, {}};
}

inline void finish(FeasibilityReport& rep)
{
    rep.overall = Verdict::solvable;
    for (const auto& c : rep.conditions) {
        if (c.passed() || c.status == CheckStatus::skipped) continue;
        rep.failed_condition = c.label;
        rep.overall = c.note == "AllSingular" ? Verdict::well_posedness_obstruction : Verdict::infeasible;
        return;
    }
    for (const auto& c : rep.conditions)
        if (c.status == CheckStatus::skipped) {
            rep.overall = Verdict::infeasible;
            rep.failed_condition = c.label;
            return;
        }
}

// family + well-posed member, recorded under `label`
inline ConditionResult wellposed_condition(const std::string& label, const PlantSystem& sys, const Subspace& S,
                                           const Subspace& V, const AnalyzeOptions& opt, FeasibilityReport* rep)
{
    ConditionResult c{label, CheckStatus::fail, 0.0, {}};
    try {
        AffineKFamily fam = k_affine_family(sys, S, V, opt.tol);
        if (rep) rep->family = fam;
        const Matrix K = select_wellposed(fam, sys.D_y, opt.trials, opt.seed);
        c.residual = clk_residual(sys, S, V, K);
        c.status = c.residual <= opt.tol.residual ? CheckStatus::pass : CheckStatus::fail;
        if (rep) rep->K = K;
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::AllSingular) c.note = "AllSingular";
        else if (e.kind() == ErrorKind::NoSolution) c.note = "NoSolution";
        else throw;
        c.residual = e.residual();
    }
    return c;
}

}  // namespace detail

inline FeasibilityReport analyze_p1(const PlantSystem& sys, const AnalyzeOptions& opt = {})
{
    sys.validate();
    const auto& tol = opt.tol;
    FeasibilityReport rep;
    rep.problem = ProblemKind::p1;
    rep.V_star = vstar(sys.control_quad(), tol);
    rep.S_star = sstar(sys.disturbance_quad(), tol);
    rep.V = rep.V_star;
    rep.S = rep.S_star;
    rep.conditions.push_back(detail::from_check("(i)", disturbance_in_reach(sys, rep.V, tol)));
    rep.conditions.push_back(detail::from_check("(ii)", measured_kernel_hidden(sys, rep.S, tol)));
    rep.conditions.push_back(detail::from_check("(iii)", nested(rep.S, rep.V, tol)));
    bool ok = true;
    for (const auto& c : rep.conditions) ok &= c.passed();
    if (ok) rep.conditions.push_back(detail::wellposed_condition("(iv)", sys, rep.S, rep.V, opt, &rep));
    else rep.conditions.push_back({"(iv)", CheckStatus::skipped, 0.0, "not evaluated"});
    detail::finish(rep);
    return rep;
}

inline bool stabilizable_pair(const Matrix& A, const Matrix& B, const StabilityRegion& region,
                              const ToleranceProfile& tol = {})
{
    const PairStabilization s = stabilize_pair(A, B, region, tol);
    return region.contains_all(s.uncontrollable);
}

inline FeasibilityReport analyze_p2(const PlantSystem& sys, const AnalyzeOptions& opt = {})
{
    sys.validate();
    const auto& tol = opt.tol;
    const StabilityRegion region = sys.region();
    FeasibilityReport rep;
    rep.problem = ProblemKind::p2;
    rep.V_star = vstar(sys.control_quad(), tol);
    rep.S_star = sstar(sys.disturbance_quad(), tol);

    const bool stab = stabilizable_pair(sys.A, sys.B, region, tol);
    const bool det = stabilizable_pair(sys.A.transpose(), sys.C.transpose(), region, tol);
    rep.conditions.push_back({"precondition", stab && det ? CheckStatus::pass : CheckStatus::fail, 0.0,
                              stab ? (det ? "" : "(C, A) not detectable") : "(A, B) not stabilizable"});

    const auto [vm, sM] = vm_sM(sys, tol);
    rep.V = sum(vm, sM, tol);
    rep.S = sM;

    rep.conditions.push_back(detail::from_check("(A)", disturbance_in_reach(sys, rep.V_star, tol)));
    rep.conditions.push_back(detail::from_check("(B)", measured_kernel_hidden(sys, rep.S_star, tol)));
    rep.conditions.push_back(detail::from_check("(C)", nested(rep.S_star, rep.V_star, tol)));

    // (D) internal stabilizability of V_m + S_M for (A,B,E,D_z)
    {
        ConditionResult c{"(D)", CheckStatus::fail, 0.0, {}};
        const InclusionCheck on = output_nulling_check(rep.V, sys.control_quad(), tol);
        c.residual = on.residual;
        if (!on.ok) {
            c.note = "not output nulling";
        } else {
            const SpectralReport sr = spectral_report(rep.V, FriendKind::output_nulling, sys.control_quad(), tol);
            if (region.contains_all(sr.internal_fixed)) c.status = CheckStatus::pass;
            else c.note = "internal fixed spectrum outside the region";
        }
        rep.conditions.push_back(c);
    }
    // (E) external detectability of S_M for (A,H,C,G_y)
    {
        ConditionResult c{"(E)", CheckStatus::fail, 0.0, {}};
        const InclusionCheck ic = input_containing_check(rep.S, sys.disturbance_quad(), tol);
        c.residual = ic.residual;
        if (!ic.ok) {
            c.note = "not input containing";
        } else {
            const SpectralReport sr = spectral_report(rep.S, FriendKind::input_containing, sys.disturbance_quad(), tol);
            if (region.contains_all(sr.external_fixed)) c.status = CheckStatus::pass;
            else c.note = "external fixed spectrum outside the region";
        }
        rep.conditions.push_back(c);
    }
    bool ok = true;
    for (const auto& c : rep.conditions) ok &= c.passed();
    if (ok) {
        rep.conditions.push_back(detail::wellposed_condition("(F)", sys, rep.S_star, rep.V_star, opt, &rep));
    } else {
        bool abc = true;
        for (const auto& c : rep.conditions)
            if (c.label == "(A)" || c.label == "(B)" || c.label == "(C)") abc &= c.passed();
        if (abc) rep.conditions.push_back(detail::wellposed_condition("(F)", sys, rep.S_star, rep.V_star, opt, &rep));
        else rep.conditions.push_back({"(F)", CheckStatus::skipped, 0.0, "not evaluated"});
    }
    detail::finish(rep);

    // cross-check through the largest stabilizability / smallest detectability subspaces
    try {
        const Subspace Vg = vstar_g(sys.control_quad(), region, tol);
        const Subspace Sg = sstar_g(sys.disturbance_quad(), region, tol);
        bool alt = stab && det && disturbance_in_reach(sys, Vg, tol).ok && measured_kernel_hidden(sys, Sg, tol).ok &&
                   nested(Sg, Vg, tol).ok;
        if (alt) {
            const ConditionResult c = detail::wellposed_condition("(iv)g", sys, Sg, Vg, opt, nullptr);
            alt = c.passed();
        }
        rep.alternative_route_agrees = alt == (rep.overall == Verdict::solvable);
    } catch (const Error& e) {
        rep.alternative_route_note = e.what();
    }
    return rep;
}

struct KSetEquivalence {
    bool equal = false;
    double max_residual = 0.0;
    Index dim_first = 0, dim_second = 0;
};

/// Families for (S*, V*) and (S_M, V_m + S_M) compared as affine sets.
inline KSetEquivalence k_set_equivalence(const PlantSystem& sys, const ToleranceProfile& tol = {})
{
    const Subspace V = vstar(sys.control_quad(), tol);
    const Subspace S = sstar(sys.disturbance_quad(), tol);
    const auto [vm, sM] = vm_sM(sys, tol);
    const Subspace V2 = sum(vm, sM, tol);
    const AffineKFamily f1 = k_affine_family(sys, S, V, tol);
    const AffineKFamily f2 = k_affine_family(sys, sM, V2, tol);
    KSetEquivalence out;
    out.dim_first = f1.dim();
    out.dim_second = f2.dim();
    auto probe = [&](const AffineKFamily& from, const Subspace& So, const Subspace& Vo) {
        out.max_residual = std::max(out.max_residual, clk_residual(sys, So, Vo, from.K0));
        for (const auto& Dk : from.directions)
            out.max_residual = std::max(out.max_residual, clk_residual(sys, So, Vo, from.K0 + Dk));
    };
    probe(f1, sM, V2);
    probe(f2, S, V);
    out.equal = out.dim_first == out.dim_second && out.max_residual <= 1e-8;
    return out;
}

/// Compensator of order n built from the static gain K and the friends F, G.
inline Compensator synthesize(const PlantSystem& sys, const Matrix& K, const Matrix& F, const Matrix& G)
{
    sys.validate();
    const Index m = sys.m();
    if (K.rows() != m || K.cols() != sys.p() || F.rows() != m || F.cols() != sys.n() || G.rows() != sys.n() ||
        G.cols() != sys.p())
        throw Error(ErrorKind::DimensionMismatch, "synthesize: K, F or G has the wrong shape");
    const Matrix KDy = K * sys.D_y;
    if (!is_wellposed(KDy)) throw Error(ErrorKind::WellPosednessViolated, "I + K D_y is singular");
    const Matrix Winv = (Matrix::Identity(m, m) + KDy).inverse();
    const Matrix BG = sys.B + G * sys.D_y;
    Compensator c;
    c.A_c = sys.A + G * sys.C + BG * Winv * (F - K * sys.C);
    c.B_c = BG * Winv * K - G;
    c.C_c = Winv * (F - K * sys.C);
    c.D_c = Winv * K;
    const Matrix DyDc = sys.D_y * c.D_c;
    if (!is_wellposed(-DyDc))
        throw Error(ErrorKind::NumericalFailure, "I - D_y D_c lost invertibility despite a well-posed K");
    return c;
}

struct FriendPair {
    FriendCertificate F, G;
};

/// Friends of V for (A,B,E,D_z) and of S for (A,H,C,G_y), stabilizing when asked.
inline FriendPair synthesis_friends(const PlantSystem& sys, const Subspace& V, const Subspace& S, bool stabilize,
                                    const ToleranceProfile& tol = {})
{
    if (stabilize)
        return {stabilizing_friend(V, FriendKind::output_nulling, sys.control_quad(), sys.region(), tol),
                stabilizing_friend(S, FriendKind::input_containing, sys.disturbance_quad(), sys.region(), tol)};
    return {friend_of(FriendKind::output_nulling, V, sys.control_quad(), tol),
            friend_of(FriendKind::input_containing, S, sys.disturbance_quad(), tol)};
}

inline Compensator synthesize(const PlantSystem& sys, const Subspace& V, const Subspace& S, const Matrix& K,
                              bool stabilize, const ToleranceProfile& tol = {})
{
    const FriendPair fr = synthesis_friends(sys, V, S, stabilize, tol);
    return synthesize(sys, K, fr.F.matrix, fr.G.matrix);
}

struct RecoveredParameters {
    Matrix K, F, G;
    double consistency = 0.0;  // |A_c - formula(K, F, G)|
};

/// Inverts the compensator formulas: K = D_c (I - D_y D_c)^{-1}, etc.
inline RecoveredParameters recover_parameters(const PlantSystem& sys, const Compensator& c)
{
    const Index p = sys.p();
    const Matrix Wp = (Matrix::Identity(p, p) - sys.D_y * c.D_c).inverse();
    RecoveredParameters out;
    out.K = c.D_c * Wp;
    out.F = (Matrix::Identity(sys.m(), sys.m()) + out.K * sys.D_y) * c.C_c + out.K * sys.C;
    out.G = (sys.B * c.D_c - c.B_c) * Wp;
    const Compensator back = synthesize(sys, out.K, out.F, out.G);
    out.consistency = std::max({(back.A_c - c.A_c).norm(), (back.B_c - c.B_c).norm(), (back.C_c - c.C_c).norm(),
                                (back.D_c - c.D_c).norm()});
    return out;
}

/// Failure of the solve pipeline; carries the analysis that explains it.
class SolveFailure : public Error {
public:
    SolveFailure(ErrorKind kind, const std::string& what, FeasibilityReport report)
        : Error(kind, what), report_(std::move(report))
    {
    }
    const FeasibilityReport& report() const { return report_; }

private:
    FeasibilityReport report_;
};

struct SolveOptions {
    ToleranceProfile tol;
    int trials = 64;
    std::uint64_t seed = 1;
    int samples = 20;
};

struct SolveResult {
    Compensator compensator;
    FeasibilityReport report;
    Matrix K, F, G;
    ClosedLoop loop;
    DecouplingCertificate certificate;
    double transfer_max = 0.0;
    std::optional<StabilityResult> stability;
};

inline SolveResult solve(const PlantSystem& sys, ProblemKind problem, const SolveOptions& opt = {})
{
    const AnalyzeOptions aopt{opt.tol, opt.trials, opt.seed};
    SolveResult out;
    out.report = problem == ProblemKind::p1 ? analyze_p1(sys, aopt) : analyze_p2(sys, aopt);
    const FeasibilityReport& rep = out.report;
    if (rep.overall == Verdict::infeasible)
        throw SolveFailure(ErrorKind::Infeasible, "condition " + rep.failed_condition + " fails", rep);
    if (rep.overall == Verdict::well_posedness_obstruction)
        throw SolveFailure(ErrorKind::WellPosednessObstruction, "I + K D_y is singular on the whole family", rep);

    const bool stabilize = problem == ProblemKind::p2;
    if (stabilize) {
        const AffineKFamily fam = k_affine_family(sys, rep.S, rep.V, opt.tol);
        out.K = select_wellposed(fam, sys.D_y, opt.trials, opt.seed);
    } else {
        out.K = *rep.K;
    }
    const FriendPair fr = synthesis_friends(sys, rep.V, rep.S, stabilize, opt.tol);
    out.F = fr.F.matrix;
    out.G = fr.G.matrix;
    out.compensator = synthesize(sys, out.K, out.F, out.G);
    out.loop = close_loop(sys, out.compensator);
    out.certificate = certify_decoupled(out.loop, opt.tol);
    out.transfer_max = transfer_samples(out.loop, sample_points(out.loop, opt.samples, opt.seed));
    if (!out.certificate.valid())
        throw SolveFailure(ErrorKind::CertificateFailed, "synthesized loop failed the decoupling certificate", rep);
    if (stabilize) {
        out.stability = stability_check(out.loop.A_hat, sys.region(stability_margin));
        if (!out.stability->pass)
            throw SolveFailure(ErrorKind::CertificateFailed, "synthesized loop is not stable", rep);
    }
    return out;
}

}  // namespace ddp
