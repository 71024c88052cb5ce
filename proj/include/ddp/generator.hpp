#pragma once

#include "ddp/plant.hpp"
#include "ddp/random.hpp"

namespace ddp {

struct InstanceSpec {
    std::uint64_t seed = 0;
    Index n = 3, m = 1, q = 1, p = 1, r = 1;
    RegionKind time_domain = RegionKind::continuous;
    bool solvable_by_construction = true;
    // diagonal blocks of A + BF drawn inside the region (stabilizing candidates)
    bool stable_blocks = false;

    void validate() const
    {
        if (n < 1 || m < 1 || q < 1 || p < 1 || r < 1)
            throw Error(ErrorKind::InvalidInput, "instance dimensions must be positive");
    }
};

/// Plant together with the data it was built around.
struct GeneratedInstance {
    PlantSystem sys;
    Subspace V, S;  // V output nulling, S input containing, S inside V
    Matrix K, F, G;
};

/// Dimensions drawn from the seed: n in [2,6], m in [1,3], q in [1,2], p in [1,3], r in [1,2].
inline InstanceSpec random_spec(std::uint64_t seed, RegionKind kind = RegionKind::continuous, bool stable_blocks = false)
{
    Rng rng(seed * 0x2545f4914f6cdd1dULL + 11);
    InstanceSpec s;
    s.seed = seed;
    s.n = rng.integer(2, 6);
    s.m = rng.integer(1, 3);
    s.q = rng.integer(1, 2);
    s.p = rng.integer(1, 3);
    s.r = rng.integer(1, 2);
    s.time_domain = kind;
    s.stable_blocks = stable_blocks;
    return s;
}

namespace detail {

inline Matrix region_block(Rng& rng, Index k, RegionKind kind)
{
    if (k == 0) return Matrix(0, 0);
    const Matrix M = rng.normal_matrix(k, k);
    if (kind == RegionKind::continuous)
        return -(M * M.transpose() / static_cast<double>(k) + 0.5 * Matrix::Identity(k, k));
    double rho = 0.0;
    for (const auto& z : eigenvalues(M)) rho = std::max(rho, std::abs(z));
    return rho > 1e-12 ? Matrix(0.6 / rho * M) : M;
}

inline GeneratedInstance build_solvable(Rng& rng, const InstanceSpec& spec)
{
    const Index n = spec.n, m = spec.m, q = spec.q, p = spec.p, r = spec.r;
    const Matrix T = rng.orthogonal(n);
    const Index k = rng.integer(1, static_cast<int>(n));
    const Index j = rng.integer(0, static_cast<int>(k));
    const Matrix Vb = T.leftCols(k);
    const Matrix Sb = T.leftCols(j);

    GeneratedInstance g;
    PlantSystem& sys = g.sys;
    sys.time_domain = spec.time_domain;
    sys.B = rng.normal_matrix(n, m);
    sys.D_z = rng.normal_matrix(r, m);
    sys.C = rng.normal_matrix(p, n);
    sys.G_y = rng.normal_matrix(p, q);
    sys.D_y = rng.normal_matrix(p, m);
    g.K = rng.normal_matrix(m, p);
    g.F = rng.normal_matrix(m, n);
    // (K C - F) must vanish on S
    g.F += (g.K * sys.C - g.F) * Sb * Sb.transpose();

    // A + BF, block upper triangular over (S, V ominus S, rest)
    Matrix Ahat = rng.normal_matrix(n, n);
    if (spec.stable_blocks) {
        Ahat *= 0.5;
        const Index sizes[3] = {j, k - j, n - k};
        Index off = 0;
        for (Index s : sizes) {
            Ahat.block(off, off, s, s) = region_block(rng, s, spec.time_domain);
            off += s;
        }
    }
    Ahat.bottomLeftCorner(n - j, j).setZero();
    Ahat.block(k, j, n - k, k - j).setZero();
    const Matrix Acl = T * Ahat * T.transpose();
    sys.A = Acl - sys.B * g.F;

    const Matrix R = rng.normal_matrix(r, n);
    sys.E = R * (Matrix::Identity(n, n) - Vb * Vb.transpose()) - sys.D_z * g.F;

    const Matrix Z1 = rng.normal_matrix(j, p);
    g.G = sys.B * g.K - Sb * Z1;
    const Matrix Xs = rng.normal_matrix(j, q);
    sys.H = Sb * Xs - g.G * sys.G_y;
    sys.G_z = -sys.D_z * g.K * sys.G_y;

    g.V = Subspace::from_orthonormal(Vb);
    g.S = j > 0 ? Subspace::from_orthonormal(Sb) : Subspace::trivial(n);
    return g;
}

}  // namespace detail

/// Deterministic given the spec. Solvable instances are assembled around a
/// nested pair S inside V with friends F, G and a well-posed coupling gain K.
inline GeneratedInstance generate_instance_with_witness(const InstanceSpec& spec)
{
    spec.validate();
    Rng rng(spec.seed);
    if (!spec.solvable_by_construction) {
        GeneratedInstance g;
        PlantSystem& s = g.sys;
        s.time_domain = spec.time_domain;
        s.A = rng.normal_matrix(spec.n, spec.n);
        s.B = rng.normal_matrix(spec.n, spec.m);
        s.H = rng.normal_matrix(spec.n, spec.q);
        s.C = rng.normal_matrix(spec.p, spec.n);
        s.D_y = rng.normal_matrix(spec.p, spec.m);
        s.G_y = rng.normal_matrix(spec.p, spec.q);
        s.E = rng.normal_matrix(spec.r, spec.n);
        s.D_z = rng.normal_matrix(spec.r, spec.m);
        s.G_z = rng.normal_matrix(spec.r, spec.q);
        return g;
    }
    for (int attempt = 0; attempt < 20; ++attempt) {
        GeneratedInstance g = detail::build_solvable(rng, spec);
        const Index m = spec.m;
        const Matrix I_KD = Matrix::Identity(m, m) + g.K * g.sys.D_y;
        Eigen::JacobiSVD<Matrix> svd(I_KD);
        const double smin = svd.singularValues()(m - 1);
        if (smin < 1e-2 || svd.singularValues()(0) / smin > 1e4) continue;
        if (!g.sys.A.allFinite()) continue;
        return g;
    }
    throw Error(ErrorKind::GenerationFailed, "could not draw a well-conditioned instance");
}

inline PlantSystem generate_instance(const InstanceSpec& spec) { return generate_instance_with_witness(spec).sys; }

}  // namespace ddp
