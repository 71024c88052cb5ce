#include <gtest/gtest.h>

#include "ddp/subspace.hpp"
#include "ddp/random.hpp"
#include "oracle/rational_subspace.hpp"

using namespace ddp;

namespace {

Matrix mat(Index r, Index c, std::initializer_list<double> v)
{
    Matrix M(r, c);
    auto it = v.begin();
    for (Index i = 0; i < r; ++i)
        for (Index j = 0; j < c; ++j) M(i, j) = *it++;
    return M;
}

Subspace from_cols(const Matrix& M) { return span_of(M); }

Subspace oracle_span(const Matrix& M)
{
    return oracle::to_subspace(oracle::colspace(oracle::from(M)), static_cast<int>(M.rows()));
}

// random integer matrix whose rank is at most `rank`
Matrix low_rank_int(Rng& rng, Index rows, Index cols, Index rank)
{
    return rng.integer_matrix(rows, rank, -2, 2) * rng.integer_matrix(rank, cols, -2, 2);
}

}  // namespace

TEST(SpanOf, ProportionalColumns)
{
    const Subspace S = span_of(mat(2, 2, {1, 2, 2, 4}));
    ASSERT_EQ(S.dim(), 1);
    Vector v(2);
    v << 1, 2;
    EXPECT_NEAR(std::abs(S.basis().col(0).dot(v.normalized())), 1.0, 1e-14);
}

TEST(SpanOf, ZeroMatrixIsTrivial)
{
    const Subspace S = span_of(Matrix::Zero(3, 2));
    EXPECT_EQ(S.ambient_dim(), 3);
    EXPECT_EQ(S.dim(), 0);
}

TEST(SpanOf, TinyPerturbationBelowCutoff)
{
    // exact rank of the unperturbed matrix is 1
    EXPECT_EQ(oracle::rank(oracle::from(mat(2, 2, {1, 1, 0, 0}))), 1);
    EXPECT_EQ(span_of(mat(2, 2, {1, 1 + 1e-14, 0, 0})).dim(), 1);
}

TEST(SpanOf, RejectsNonFinite)
{
    Matrix M = Matrix::Identity(2, 2);
    M(0, 1) = std::nan("");
    try {
        span_of(M);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidInput);
    }
}

TEST(KernelOf, Basics)
{
    const Subspace K = kernel_of(mat(1, 2, {1, 1}));
    ASSERT_EQ(K.dim(), 1);
    EXPECT_NEAR(std::abs(K.basis()(0, 0) + K.basis()(1, 0)), 0.0, 1e-15);
    EXPECT_EQ(kernel_of(Matrix::Identity(3, 3)).dim(), 0);

    const Matrix C = mat(2, 3, {1, 1, 0, 0, 1, 0});
    const Subspace KC = kernel_of(C);
    ASSERT_EQ(KC.dim(), 1);
    EXPECT_NEAR(std::abs(KC.basis()(2, 0)), 1.0, 1e-14);
    EXPECT_LE((C * KC.basis()).norm(), 1e-12);
}

TEST(Combine, CoordinateAxes)
{
    const Matrix I3 = Matrix::Identity(3, 3);
    const Subspace e1 = from_cols(I3.col(0)), e2 = from_cols(I3.col(1)), e3 = from_cols(I3.col(2));
    EXPECT_TRUE(is_equal(combine(CombineMode::sum, e1, e2), from_cols(I3.leftCols(2))));
    const Subspace a = from_cols(I3.leftCols(2));
    const Subspace b = from_cols(I3.rightCols(2));
    EXPECT_TRUE(is_equal(combine(CombineMode::intersect, a, b), e2));
    (void)e3;
}

TEST(Combine, DimensionMismatch)
{
    try {
        sum(Subspace::full(2), Subspace::full(3));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
    }
}

TEST(Combine, RandomIntersectionMatchesOracle)
{
    Rng rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        const Matrix M1 = rng.integer_matrix(6, 4, -3, 3);
        const Matrix M2 = rng.integer_matrix(6, 4, -3, 3);
        const auto exact = oracle::intersect(oracle::colspace(oracle::from(M1)), oracle::colspace(oracle::from(M2)));
        const Subspace got = intersect(span_of(M1), span_of(M2));
        EXPECT_LE(subspace_distance(got, oracle::to_subspace(exact, 6)), 1e-8) << "trial " << trial;
        EXPECT_EQ(got.dim(), exact.cols);
    }
}

TEST(Combine, LatticeLaws)
{
    Rng rng(12);
    for (int trial = 0; trial < 50; ++trial) {
        const Index n = rng.integer(2, 6);
        const Subspace a = span_of(low_rank_int(rng, n, n, rng.integer(0, static_cast<int>(n))));
        const Subspace b = span_of(low_rank_int(rng, n, n, rng.integer(0, static_cast<int>(n))));
        const Subspace c = span_of(low_rank_int(rng, n, n, rng.integer(0, static_cast<int>(n))));
        EXPECT_TRUE(is_equal(sum(a, b), sum(b, a)));
        EXPECT_TRUE(is_equal(intersect(a, b), intersect(b, a)));
        EXPECT_TRUE(is_equal(sum(sum(a, b), c), sum(a, sum(b, c))));
        EXPECT_TRUE(is_equal(intersect(intersect(a, b), c), intersect(a, intersect(b, c))));
        EXPECT_EQ(sum(a, b).dim() + intersect(a, b).dim(), a.dim() + b.dim());
        for (const Subspace* s : {&a, &b, &c}) EXPECT_LE(s->ortho_error(), 1e-11);
    }
}

TEST(Preimage, Extremes)
{
    Rng rng(3);
    const Matrix M = rng.integer_matrix(3, 4, -2, 2);
    EXPECT_TRUE(is_equal(preimage(M, Subspace::trivial(3)), kernel_of(M)));
    EXPECT_TRUE(is_equal(preimage(M, Subspace::full(3)), Subspace::full(4)));
}

TEST(Preimage, RandomMatchesOracle)
{
    Rng rng(13);
    for (int trial = 0; trial < 40; ++trial) {
        const Index rows = rng.integer(1, 5), cols = rng.integer(1, 5);
        const Matrix M = rng.integer_matrix(rows, cols, -3, 3);
        const Matrix S = low_rank_int(rng, rows, 2, rng.integer(0, 2));
        const auto exact = oracle::preimage(oracle::from(M), oracle::colspace(oracle::from(S)));
        const Subspace got = preimage(M, span_of(S));
        EXPECT_LE(subspace_distance(got, oracle::to_subspace(exact, static_cast<int>(cols))), 1e-8);
    }
}

TEST(Relate, Cases)
{
    const Subspace S = span_of(mat(3, 1, {0, 2, 7}));
    const Subspace V = span_of(mat(3, 2, {1, 0, 0, 0, 0, 1}));
    EXPECT_EQ(relate(S, S), Relation::equal);
    EXPECT_EQ(relate(Subspace::trivial(3), S), Relation::contained);
    EXPECT_EQ(relate(V, Subspace::trivial(3)), Relation::contains);
    EXPECT_EQ(relate(S, V), Relation::incomparable);
}

TEST(InvariantHull, Basics)
{
    const Matrix A = mat(2, 2, {0, 1, 0, 0});
    const Subspace e2 = span_of(mat(2, 1, {0, 1}));
    int steps = -1;
    const Subspace hull = invariant_hull(HullDirection::smallest_containing, A, e2, {}, &steps);
    EXPECT_EQ(hull.dim(), 2);
    EXPECT_EQ(steps, 1);
    const Subspace e1 = span_of(mat(2, 1, {1, 0}));
    EXPECT_TRUE(is_equal(invariant_hull(HullDirection::smallest_containing, A, e1), e1));
    EXPECT_TRUE(is_equal(invariant_hull(HullDirection::largest_contained, A, e1), e1));
    EXPECT_EQ(invariant_hull(HullDirection::largest_contained, A, e2).dim(), 0);
}

TEST(InvariantHull, RandomMatchesOracle)
{
    Rng rng(14);
    for (int trial = 0; trial < 40; ++trial) {
        const Index n = rng.integer(1, 5);
        const Matrix A = rng.integer_matrix(n, n, -5, 5);
        const Matrix S = low_rank_int(rng, n, 2, rng.integer(0, 2));
        int steps = 0;
        const Subspace up = invariant_hull(HullDirection::smallest_containing, A, span_of(S), {}, &steps);
        const auto ex_up = oracle::smallest_invariant(oracle::from(A), oracle::colspace(oracle::from(S)));
        EXPECT_LE(subspace_distance(up, oracle::to_subspace(ex_up, static_cast<int>(n))), 1e-8);
        EXPECT_LE(steps, std::max<Index>(n - 1, 0));

        const Matrix big = low_rank_int(rng, n, n, rng.integer(0, static_cast<int>(n)));
        const Subspace down = invariant_hull(HullDirection::largest_contained, A, span_of(big));
        const auto ex_down = oracle::largest_invariant(oracle::from(A), oracle::colspace(oracle::from(big)));
        EXPECT_LE(subspace_distance(down, oracle::to_subspace(ex_down, static_cast<int>(n))), 1e-8);
    }
}

TEST(ModalSubspace, Diagonal)
{
    const StabilityRegion cont{RegionKind::continuous, 0.0};
    const Matrix A = Vector::Map(std::vector<double>{-1, 2}.data(), 2).asDiagonal();
    const Subspace S = modal_subspace(A, cont);
    ASSERT_EQ(S.dim(), 1);
    EXPECT_NEAR(std::abs(S.basis()(0, 0)), 1.0, 1e-12);
    EXPECT_EQ(modal_subspace(-Matrix::Identity(3, 3), cont).dim(), 3);
    // companion form with roots -1, -2
    EXPECT_EQ(modal_subspace(mat(2, 2, {0, 1, -2, -3}), cont).dim(), 2);
}

TEST(ModalSubspace, ComplexPairsAndDiscrete)
{
    // rotation blocks: 0.5*R(theta) is stable in discrete time, 2*R is not
    Matrix A = Matrix::Zero(4, 4);
    A.topLeftCorner(2, 2) = mat(2, 2, {0.3, -0.4, 0.4, 0.3});
    A.bottomRightCorner(2, 2) = mat(2, 2, {1.2, -1.6, 1.6, 1.2});
    Rng rng(5);
    const Matrix T = rng.orthogonal(4);
    const Matrix At = T * A * T.transpose();
    const Subspace S = modal_subspace(At, {RegionKind::discrete, 0.0});
    ASSERT_EQ(S.dim(), 2);
    EXPECT_LE(subspace_distance(S, span_of(T.leftCols(2))), 1e-10);
    const Matrix r = At * S.basis() - S.basis() * (S.basis().transpose() * At * S.basis());
    EXPECT_LE(r.norm(), 1e-12);
}

TEST(ModalSubspace, BoundaryRaises)
{
    try {
        modal_subspace(mat(2, 2, {0, 1, -1, 0}), {RegionKind::continuous, 0.0});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::BoundarySpectrum);
        EXPECT_EQ(e.eigenvalues().size(), 2u);
    }
}

TEST(ExtendedOps, Examples)
{
    const Subspace W = span_of(mat(2, 1, {1, 1}));
    EXPECT_EQ(extended_ops(ExtendedOp::project, W, 1).dim(), 1);
    EXPECT_EQ(extended_ops(ExtendedOp::intersect, W, 1).dim(), 0);
    const Subspace full = Subspace::full(5);
    EXPECT_EQ(extended_project(full, 3).dim(), 3);
    EXPECT_EQ(extended_intersect(full, 3).dim(), 3);
}

TEST(ExtendedOps, DualityAndContainment)
{
    Rng rng(15);
    for (int trial = 0; trial < 60; ++trial) {
        const Index n = rng.integer(1, 4), extra = rng.integer(1, 3);
        const Subspace W = span_of(low_rank_int(rng, n + extra, n + extra, rng.integer(0, static_cast<int>(n + extra))));
        // p(W^perp) = i(W)^perp
        EXPECT_TRUE(is_equal(extended_project(W.complement(), n), extended_intersect(W, n).complement()));
        EXPECT_EQ(relate(extended_intersect(W, n), extended_project(W, n)) == Relation::incomparable, false);

        // W containing im[H1; H2] projects onto something containing im H1
        const Matrix H = rng.integer_matrix(n + extra, 1, -2, 2);
        const Subspace WH = sum(W, span_of(H));
        EXPECT_TRUE(is_contained(span_of(H.topRows(n)), extended_project(WH, n)));
    }
}

TEST(Subspace, Orthonormality)
{
    Rng rng(16);
    for (int trial = 0; trial < 30; ++trial) {
        const Matrix left = rng.normal_matrix(6, 3);
        const Matrix M = left * rng.normal_matrix(3, 5) * 1e3;
        const Subspace S = span_of(M);
        EXPECT_EQ(S.dim(), 3);
        EXPECT_LE(S.ortho_error(), 10 * ToleranceProfile{}.ortho);
        EXPECT_LE(subspace_distance(S, span_of(left)), 1e-8);
        const Matrix Mi = rng.integer_matrix(6, 3, -3, 3) * rng.integer_matrix(3, 5, -3, 3);
        EXPECT_LE(subspace_distance(span_of(Mi), oracle_span(Mi)), 1e-8);
    }
}
