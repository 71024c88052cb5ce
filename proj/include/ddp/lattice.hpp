#pragma once

#include <string>
#include <vector>

#include "ddp/plant.hpp"

namespace ddp {

/// quadB = (A, [B H], E, [D_z G_z]),  quadC = (A, H, [C;E], [G_y;G_z])
inline std::pair<Quadruple, Quadruple> extended_quadruples(const PlantSystem& sys)
{
    sys.validate();
    Quadruple qb{sys.A, detail::hstack(sys.B, sys.H), sys.E, detail::hstack(sys.D_z, sys.G_z)};
    Quadruple qc{sys.A, sys.H, detail::vstack(sys.C, sys.E), detail::vstack(sys.G_y, sys.G_z)};
    return {qb, qc};
}

/// V_m = R* of quadB, S_M = Q* of quadC.
inline std::pair<Subspace, Subspace> vm_sM(const PlantSystem& sys, const ToleranceProfile& tol = {})
{
    const auto [qb, qc] = extended_quadruples(sys);
    return {rstar_qstar(qb, tol).first, rstar_qstar(qc, tol).second};
}

// ---- the three structural conditions shared by both problems ----

/// im[H;G_z] inside (V (+) 0) + im[B;D_z]; residual is a containment gap.
inline InclusionCheck disturbance_in_reach(const PlantSystem& sys, const Subspace& V, const ToleranceProfile& tol = {})
{
    const Subspace target = sum(embed(V, sys.r()), span_of(detail::vstack(sys.B, sys.D_z), tol), tol);
    const Subspace dist = span_of(detail::vstack(sys.H, sys.G_z), tol);
    const double gap = containment_gap(dist, target);
    return {gap <= tol.angle, gap};
}

/// ker[E G_z] contains (S (+) W) cap ker[C G_y].
inline InclusionCheck measured_kernel_hidden(const PlantSystem& sys, const Subspace& S, const ToleranceProfile& tol = {})
{
    const Subspace X = intersect(embed_full(S, sys.q()), kernel_of(detail::hstack(sys.C, sys.G_y), tol), tol);
    const Matrix EG = detail::hstack(sys.E, sys.G_z);
    if (X.is_trivial() || EG.rows() == 0) return {true, 0.0};
    const double res = detail::spectral_norm(EG * X.basis()) / std::max(1.0, detail::spectral_norm(EG));
    return {res <= tol.residual, res};
}

/// S inside V
inline InclusionCheck nested(const Subspace& S, const Subspace& V, const ToleranceProfile& tol = {})
{
    const double gap = containment_gap(S, V);
    return {S.dim() <= V.dim() && gap <= tol.angle, gap};
}

enum class CheckStatus { pass, fail, skipped, marginal };

inline std::string to_string(CheckStatus s)
{
    switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::skipped: return "skipped";
    case CheckStatus::marginal: return "marginal";
    }
    return "?";
}

struct NamedCheck {
    std::string name;
    CheckStatus status = CheckStatus::skipped;
    double residual = 0.0;
};

struct LatticeReport {
    Subspace v_m, s_M;
    std::vector<NamedCheck> inclusion_checks;
    bool sequence_sums_ok = true;
    bool extended_ok = true;
    bool plant_ok = true;
    // recursion sequences: V-hat / S-hat of (A,B,E,D_z), S-tilde of quadB
    std::vector<Subspace> v_hat, s_hat, s_tilde;

    const NamedCheck* find(const std::string& name) const
    {
        for (const auto& c : inclusion_checks)
            if (c.name == name) return &c;
        return nullptr;
    }
};

namespace detail {

// Hypothesis evaluated against `threshold`: a residual within a factor of ten
// of the threshold (either side) makes the resulting verdict marginal.
inline bool hypothesis_marginal(double residual, double threshold)
{
    return residual > threshold / 10.0 && residual <= threshold * 10.0;
}

inline const Subspace& at_or_last(const std::vector<Subspace>& seq, std::size_t i)
{
    return seq[std::min(i, seq.size() - 1)];
}

}  // namespace detail

inline LatticeReport lattice_report(const PlantSystem& sys, const ToleranceProfile& tol = {})
{
    sys.validate();
    LatticeReport rep;
    const auto [qb, qc] = extended_quadruples(sys);
    const Quadruple qe = sys.control_quad();
    const Quadruple qd = sys.disturbance_quad();

    const RecursionResult vhat = vstar_sequence(qe, tol);
    const RecursionResult shat = sstar_sequence(qe, tol);
    const RecursionResult stil = sstar_sequence(qb, tol);
    rep.v_hat = vhat.sequence;
    rep.s_hat = shat.sequence;
    rep.s_tilde = stil.sequence;

    const Subspace Ve = vhat.limit;
    const Subspace Vb = vstar(qb, tol);
    const Subspace Sb = stil.limit;
    const Subspace Vc = vstar(qc, tol);
    const Subspace Sc = sstar(qc, tol);
    const Subspace Sd = sstar(qd, tol);
    rep.v_m = intersect(Vb, Sb, tol);
    rep.s_M = sum(Vc, Sc, tol);

    auto add = [&](const std::string& name, bool hyp_ok, bool hyp_marginal, const InclusionCheck& concl) {
        NamedCheck c{name, CheckStatus::skipped, concl.residual};
        if (hyp_ok) c.status = !concl.ok ? CheckStatus::fail : (hyp_marginal ? CheckStatus::marginal : CheckStatus::pass);
        rep.inclusion_checks.push_back(c);
        return c.status != CheckStatus::fail;
    };

    // monotone chains, unconditional
    add("chain.v_chain.lower", true, false, nested(Vc, Ve, tol));
    add("chain.v_chain.upper", true, false, nested(Ve, Vb, tol));
    add("chain.s_chain.lower", true, false, nested(Sc, Sd, tol));
    add("chain.s_chain.upper", true, false, nested(Sd, Sb, tol));

    const InclusionCheck hyp_c = nested(Sd, Ve, tol);
    const bool marg_c = detail::hypothesis_marginal(hyp_c.residual, tol.angle);
    add("chain.conditional", hyp_c.ok, marg_c, nested(Sc, Vb, tol));

    // V_m identity under the reachability-style inclusion
    const InclusionCheck hyp_i = disturbance_in_reach(sys, Ve, tol);
    const bool marg_i = detail::hypothesis_marginal(hyp_i.residual, tol.angle);
    {
        const Subspace alt = intersect(Ve, Sb, tol);
        const double d = subspace_distance(rep.v_m, alt);
        add("vm.identity", hyp_i.ok, marg_i, {d <= tol.angle, d});
    }

    // V-hat_i + S-tilde_j = V-hat_i + S-hat_j for all i, j
    {
        double worst = 0.0;
        const std::size_t len = static_cast<std::size_t>(sys.n()) + 1;
        if (hyp_i.ok) {
            for (std::size_t i = 0; i < len; ++i)
                for (std::size_t j = 0; j < len; ++j) {
                    const Subspace& vi = detail::at_or_last(vhat.sequence, i);
                    const Subspace lhs = sum(vi, detail::at_or_last(stil.sequence, j), tol);
                    const Subspace rhs = sum(vi, detail::at_or_last(shat.sequence, j), tol);
                    worst = std::max(worst, subspace_distance(lhs, rhs));
                }
        }
        rep.sequence_sums_ok = add("sequence_sums", hyp_i.ok, marg_i, {worst <= tol.angle, worst});
    }

    // structure of V_m and S_M (hypothesis: S*(A,H,C,G_y) inside V*(A,B,E,D_z))
    {
        const Subspace sumVS = sum(rep.v_m, rep.s_M, tol);
        const Subspace capVS = intersect(rep.v_m, rep.s_M, tol);
        bool ok = true;
        if (hyp_c.ok) {
            const InclusionCheck on = output_nulling_check(sumVS, qb, tol);
            ok &= add("extended.sum_output_nulling", true, marg_c, on);
            ok &= add("extended.sum_self_bounded", true, marg_c,
                      nested(rstar_qstar(qb, tol).first, sumVS, tol));
            const InclusionCheck ic = input_containing_check(capVS, qc, tol);
            ok &= add("extended.cap_input_containing", true, marg_c, ic);
            ok &= add("extended.cap_self_hidden", true, marg_c, nested(capVS, rstar_qstar(qc, tol).second, tol));
        } else {
            for (const char* nm : {"extended.sum_output_nulling", "extended.sum_self_bounded", "extended.cap_input_containing",
                                   "extended.cap_self_hidden"})
                add(nm, false, false, {true, 0.0});
        }
        rep.extended_ok = ok;

        bool ok5 = true;
        const bool h1 = hyp_c.ok && hyp_i.ok;
        {
            InclusionCheck on{true, 0.0}, sb{true, 0.0};
            if (h1) {
                on = output_nulling_check(sumVS, qe, tol);
                sb = nested(rstar_qstar(qe, tol).first, sumVS, tol);
            }
            const bool m1 = marg_c || marg_i;
            ok5 &= add("plant.sum_output_nulling", h1, m1, on);
            ok5 &= add("plant.sum_self_bounded", h1, m1, sb);
        }
        const InclusionCheck hyp_ii = measured_kernel_hidden(sys, Sd, tol);
        const bool h2 = hyp_c.ok && hyp_ii.ok;
        {
            InclusionCheck ic{true, 0.0}, sh{true, 0.0};
            if (h2) {
                ic = input_containing_check(capVS, qd, tol);
                sh = nested(capVS, rstar_qstar(qd, tol).second, tol);
            }
            const bool m2 = marg_c || detail::hypothesis_marginal(hyp_ii.residual, tol.residual);
            ok5 &= add("plant.cap_input_containing", h2, m2, ic);
            ok5 &= add("plant.cap_self_hidden", h2, m2, sh);
        }
        rep.plant_ok = ok5;
    }
    return rep;
}

}  // namespace ddp
