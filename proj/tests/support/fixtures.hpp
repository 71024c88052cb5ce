#pragma once

#include <initializer_list>

#include "ddp/ddp.hpp"

namespace fixtures {

using ddp::Matrix;

inline Matrix mat(std::initializer_list<std::initializer_list<double>> rows)
{
    const auto r = static_cast<ddp::Index>(rows.size());
    const auto c = r ? static_cast<ddp::Index>(rows.begin()->size()) : 0;
    Matrix M(r, c);
    ddp::Index i = 0;
    for (const auto& row : rows) {
        ddp::Index j = 0;
        for (double v : row) M(i, j++) = v;
        ++i;
    }
    return M;
}

inline ddp::PlantSystem fix1()
{
    ddp::PlantSystem s;
    s.A = mat({{0, 0, 0}, {0, 0, 0}, {0, -1, 1}});
    s.B = mat({{-1, 0}, {1, 0}, {0, 0}});
    s.H = mat({{1}, {-1}, {0}});
    s.C = mat({{1, 1, 0}, {0, 1, 0}});
    s.D_y = Matrix::Zero(2, 2);
    s.G_y = mat({{-1}, {0}});
    s.E = mat({{1, 0, 0}});
    s.D_z = mat({{0, 1}});
    s.G_z = mat({{1}});
    return s;
}

inline ddp::PlantSystem fix2()
{
    ddp::PlantSystem s;
    s.A = mat({{0, 0, 0}, {0, 0, 0}, {-1, 0, 0}});
    s.B = mat({{0, 0}, {-1, 0}, {0, -1}});
    s.H = mat({{1, 0}, {0, 1}, {1, 0}});
    s.C = mat({{-1, 0, 0}, {0, 1, 1}});
    s.D_y = mat({{1, 0}, {0, -1}});
    s.G_y = mat({{0, 0}, {-1, -1}});
    s.E = mat({{0, 0, 1}});
    s.D_z = mat({{-1, 0}});
    s.G_z = mat({{0, 0}});
    return s;
}

inline ddp::PlantSystem fix3()
{
    ddp::PlantSystem s;
    s.A = Matrix::Identity(2, 2);
    s.B = mat({{-1}, {0}});
    s.H = mat({{1}, {0}});
    s.C = mat({{1, 0}});
    s.D_y = mat({{1}});
    s.G_y = mat({{1}});
    s.E = mat({{0, -1}});
    s.D_z = mat({{0}});
    s.G_z = mat({{0}});
    return s;
}

inline ddp::Compensator fix3_given()
{
    return {Matrix::Zero(2, 2), mat({{0}, {10}}), mat({{0, 3}}), mat({{6}})};
}

// A e1 = 2 e1 inside ker E; the disturbance enters along e1.
inline ddp::PlantSystem unstable_zero_plant()
{
    ddp::PlantSystem s;
    s.A = mat({{2, 1}, {0, -1}});
    s.B = mat({{0}, {1}});
    s.H = mat({{1}, {0}});
    s.C = Matrix::Identity(2, 2);
    s.D_y = Matrix::Zero(2, 1);
    s.G_y = Matrix::Zero(2, 1);
    s.E = mat({{0, 1}});
    s.D_z = mat({{0}});
    s.G_z = mat({{0}});
    return s;
}

inline ddp::PlantSystem no_disturbance(ddp::PlantSystem s)
{
    s.H.setZero();
    s.G_y.setZero();
    s.G_z.setZero();
    return s;
}

inline ddp::Quadruple random_int_quad(ddp::Rng& rng, ddp::Index max_n = 6, int range = 3)
{
    const ddp::Index n = rng.integer(1, static_cast<int>(max_n)), m = rng.integer(1, 3), p = rng.integer(1, 3);
    ddp::Quadruple q{rng.integer_matrix(n, n, -range, range), rng.integer_matrix(n, m, -range, range),
                     rng.integer_matrix(p, n, -range, range), rng.integer_matrix(p, m, -range, range)};
    if (rng.integer(0, 1)) q.D.setZero();
    return q;
}

inline ddp::Quadruple random_real_quad(ddp::Rng& rng, ddp::Index n, ddp::Index m, ddp::Index p)
{
    return {rng.normal_matrix(n, n), rng.normal_matrix(n, m), rng.normal_matrix(p, n), rng.normal_matrix(p, m)};
}

// output-nulling subspace between R* and V*: R* plus the (A+BF)-hull of a random vector of V*
inline ddp::Subspace random_output_nulling(const ddp::Quadruple& q, ddp::Rng& rng)
{
    using namespace ddp;
    const Subspace V = vstar(q);
    const Subspace R = rstar_qstar(q).first;
    if (V.dim() == 0) return V;
    const FriendCertificate fr = friend_of(FriendKind::output_nulling, V, q);
    const Vector v = V.basis() * rng.normal_matrix(V.dim(), 1);
    return invariant_hull(HullDirection::smallest_containing, q.A + q.B * fr.matrix, sum(R, span_of(v)));
}

inline ddp::Subspace random_input_containing(const ddp::Quadruple& q, ddp::Rng& rng)
{
    return random_output_nulling(q.dual(), rng).complement();
}

}  // namespace fixtures
