#pragma once

#include "ddp/lattice.hpp"
#include "ddp/random.hpp"

namespace ddp {

struct DecouplingCertificate {
    Subspace invariant_subspace;  // <A_hat | im H_hat>
    Matrix generators;            // Krylov columns spanning it
    double residual_invariance = 0.0;
    double residual_kernel = 0.0;
    double feedthrough_norm = 0.0;
    double threshold = 0.0;

    bool valid() const
    {
        return residual_invariance <= threshold && residual_kernel <= threshold && feedthrough_norm <= threshold;
    }
};

inline DecouplingCertificate certify_decoupled(const ClosedLoop& cl, const ToleranceProfile& tol = {})
{
    DecouplingCertificate cert;
    cert.threshold = tol.residual;
    // Krylov matrix [H, (A/s) H, ..., (A/s)^{N-1} H] with one rank decision at
    // the scale of H; re-orthonormalizing per step inflates roundoff along
    // weakly excited directions
    const Index N = cl.A_hat.rows();
    const double s = std::max(1.0, detail::spectral_norm(cl.A_hat));
    Matrix kry(N, N * cl.H_hat.cols());
    Matrix blk = cl.H_hat;
    for (Index i = 0; i < N; ++i) {
        kry.middleCols(i * blk.cols(), blk.cols()) = blk;
        blk = cl.A_hat * blk / s;
    }
    const double scale = std::max(1.0, detail::spectral_norm(cl.H_hat));
    const Subspace I = N == 0 ? Subspace::trivial(0) : span_of(kry, tol, scale);
    cert.invariant_subspace = I;
    cert.generators = kry;
    if (I.dim() > 0) {
        // residuals over the Krylov generators, so each direction is weighted
        // by how strongly the disturbance excites it
        const double kn = std::max(1.0, detail::spectral_norm(kry));
        const Matrix AK = cl.A_hat * kry / s;
        cert.residual_invariance = detail::spectral_norm(AK - I.basis() * (I.basis().transpose() * AK)) / kn;
        cert.residual_kernel = detail::spectral_norm(cl.C_hat * kry) / (std::max(1.0, detail::spectral_norm(cl.C_hat)) * kn);
    }
    cert.feedthrough_norm = detail::spectral_norm(cl.G_hat);
    return cert;
}

/// G_zw(lambda) = C_hat (lambda I - A_hat)^{-1} H_hat + G_hat, max spectral norm over samples.
inline double transfer_samples(const ClosedLoop& cl, const std::vector<Complex>& lambdas)
{
    const Index N = cl.A_hat.rows();
    const Spectrum poles = eigenvalues(cl.A_hat);
    const Eigen::MatrixXcd A = cl.A_hat.cast<Complex>();
    const Eigen::MatrixXcd H = cl.H_hat.cast<Complex>();
    const Eigen::MatrixXcd C = cl.C_hat.cast<Complex>();
    double worst = 0.0;
    for (const Complex& s : lambdas) {
        for (const auto& z : poles)
            if (std::abs(s - z) < 1e-6)
                throw Error(ErrorKind::SampleTooCloseToPole, "sample point closer than 1e-6 to a closed-loop pole");
        Eigen::MatrixXcd G = cl.G_hat.cast<Complex>();
        if (N > 0) {
            const Eigen::MatrixXcd M = s * Eigen::MatrixXcd::Identity(N, N) - A;
            G += C * M.partialPivLu().solve(H);
        }
        if (G.size() == 0) continue;
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(G);
        worst = std::max(worst, svd.singularValues()(0));
    }
    return worst;
}

/// `count` seeded points from an annulus around the origin sized by the
/// spectral radius of A_hat, each at least 1e-3 away from every eigenvalue.
inline std::vector<Complex> sample_points(const ClosedLoop& cl, int count, std::uint64_t seed)
{
    const Spectrum poles = eigenvalues(cl.A_hat);
    double rho = 1.0;
    for (const auto& z : poles) rho = std::max(rho, std::abs(z));
    Rng rng(seed);
    std::vector<Complex> out;
    while (static_cast<int>(out.size()) < count) {
        const double radius = rng.uniform(0.5 * rho, 2.0 * rho);
        const double angle = rng.uniform(0.0, 2.0 * M_PI);
        const Complex s = std::polar(radius, angle);
        bool ok = true;
        for (const auto& z : poles)
            if (std::abs(s - z) < 1e-3) ok = false;
        if (ok) out.push_back(s);
    }
    return out;
}

constexpr double stability_margin = 1e-8;

struct StabilityResult {
    bool pass = false;
    Spectrum spectrum;
    double worst = 0.0;  // max Re(lambda) or max |lambda|
};

inline StabilityResult stability_check(const Matrix& A_hat, const StabilityRegion& region)
{
    StabilityResult out;
    out.spectrum = eigenvalues(A_hat);
    out.pass = region.contains_all(out.spectrum);
    out.worst = -std::numeric_limits<double>::infinity();
    for (const auto& z : out.spectrum)
        out.worst = std::max(out.worst, region.kind == RegionKind::continuous ? z.real() : std::abs(z));
    return out;
}

/// max |z(t)| over unit impulses on every disturbance channel, t = 0..steps.
inline double simulate_impulse(const ClosedLoop& cl, int steps)
{
    if (cl.time_domain != RegionKind::discrete)
        throw Error(ErrorKind::ContinuousNotSupported, "impulse simulation needs a discrete-time loop");
    double worst = 0.0;
    for (Index j = 0; j < cl.H_hat.cols(); ++j) {
        if (cl.G_hat.rows() > 0) worst = std::max(worst, cl.G_hat.col(j).cwiseAbs().maxCoeff());
        Vector x = cl.H_hat.col(j);
        for (int t = 1; t <= steps; ++t) {
            if (cl.C_hat.rows() > 0) worst = std::max(worst, (cl.C_hat * x).cwiseAbs().maxCoeff());
            x = cl.A_hat * x;
        }
    }
    return worst;
}

struct NecessityReport {
    Subspace V, S;  // p(I), i(I)
    InclusionCheck v_output_nulling, s_input_containing, cond_a, cond_b, s_inside_v;

    bool ok() const
    {
        return v_output_nulling.ok && s_input_containing.ok && cond_a.ok && cond_b.ok && s_inside_v.ok;
    }
};

/// Projects the certificate subspace back on the plant state space and checks
/// that it yields an admissible (S, V) pair.
inline NecessityReport necessity_roundtrip(const PlantSystem& sys, const DecouplingCertificate& cert,
                                           const ToleranceProfile& tol = {})
{
    NecessityReport rep;
    const Index n = sys.n();
    const Matrix& gen = cert.generators;
    if (gen.cols() > 0 && gen.rows() == cert.invariant_subspace.ambient_dim()) {
        // projection and intersection read off the generators, with the rank
        // judged at their scale
        const double scale = std::max(1.0, detail::spectral_norm(gen));
        rep.V = span_of(gen.topRows(n), tol, scale);
        const Matrix ker = detail::null_basis(gen.bottomRows(gen.rows() - n), scale, tol.rank_rel);
        rep.S = span_of(gen.topRows(n) * ker, tol, scale);
    } else {
        rep.V = extended_project(cert.invariant_subspace, n, tol);
        rep.S = extended_intersect(cert.invariant_subspace, n, tol);
    }
    rep.v_output_nulling = output_nulling_check(rep.V, sys.control_quad(), tol);
    rep.s_input_containing = input_containing_check(rep.S, sys.disturbance_quad(), tol);
    rep.cond_a = disturbance_in_reach(sys, rep.V, tol);
    rep.cond_b = measured_kernel_hidden(sys, rep.S, tol);
    rep.s_inside_v = nested(rep.S, rep.V, tol);
    return rep;
}

}  // namespace ddp
