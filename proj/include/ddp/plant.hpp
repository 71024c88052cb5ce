#pragma once

#include "ddp/geometry.hpp"

namespace ddp {

/// x' = A x + B u + H w,  y = C x + D_y u + G_y w,  z = E x + D_z u + G_z w
struct PlantSystem {
    Matrix A, B, H, C, D_y, G_y, E, D_z, G_z;
    RegionKind time_domain = RegionKind::continuous;

    Index n() const { return A.rows(); }
    Index m() const { return B.cols(); }
    Index q() const { return H.cols(); }
    Index p() const { return C.rows(); }
    Index r() const { return E.rows(); }

    StabilityRegion region(double margin = 0.0) const { return {time_domain, margin}; }

    void validate() const
    {
        const auto check = [](const Matrix& M, Index rows, Index cols, const char* name) {
            if (M.rows() != rows || M.cols() != cols)
                throw Error(ErrorKind::DimensionMismatch, std::string("plant matrix ") + name + " has shape " +
                                                              std::to_string(M.rows()) + "x" + std::to_string(M.cols()) +
                                                              ", expected " + std::to_string(rows) + "x" +
                                                              std::to_string(cols));
            detail::require_finite(M, name);
        };
        const Index n_ = n(), m_ = m(), q_ = q(), p_ = p(), r_ = r();
        check(A, n_, n_, "A");
        check(B, n_, m_, "B");
        check(H, n_, q_, "H");
        check(C, p_, n_, "C");
        check(D_y, p_, m_, "D_y");
        check(G_y, p_, q_, "G_y");
        check(E, r_, n_, "E");
        check(D_z, r_, m_, "D_z");
        check(G_z, r_, q_, "G_z");
    }

    /// (A, B, E, D_z): control input to regulated output
    Quadruple control_quad() const { return {A, B, E, D_z}; }
    /// (A, H, C, G_y): disturbance to measurement
    Quadruple disturbance_quad() const { return {A, H, C, G_y}; }
};

struct Compensator {
    Matrix A_c, B_c, C_c, D_c;
    Index order() const { return A_c.rows(); }
};

struct ClosedLoop {
    Matrix A_hat, H_hat, C_hat, G_hat;
    Matrix W;  // (I - D_y D_c)^{-1}, p x p
    RegionKind time_domain = RegionKind::continuous;
    Index plant_order = 0;
};

constexpr double wellposed_margin = 1e-8;

/// |det(I + M)| >= delta (1 + |M|)
inline bool is_wellposed(const Matrix& M, double delta = wellposed_margin)
{
    if (M.rows() == 0) return true;
    const double d = std::abs((Matrix::Identity(M.rows(), M.cols()) + M).determinant());
    return d >= delta * (1.0 + detail::spectral_norm(M));
}

inline ClosedLoop close_loop(const PlantSystem& sys, const Compensator& k)
{
    sys.validate();
    const Index n = sys.n(), s = k.order(), p = sys.p(), m = sys.m();
    if (k.A_c.cols() != s || k.B_c.rows() != s || k.B_c.cols() != p || k.C_c.rows() != m || k.C_c.cols() != s ||
        k.D_c.rows() != m || k.D_c.cols() != p)
        throw Error(ErrorKind::DimensionMismatch, "compensator shape does not match the plant");
    const Matrix DyDc = sys.D_y * k.D_c;
    if (!is_wellposed(-DyDc)) throw Error(ErrorKind::NotWellPosed, "I - D_y D_c is (numerically) singular");
    ClosedLoop cl;
    cl.time_domain = sys.time_domain;
    cl.plant_order = n;
    cl.W = (Matrix::Identity(p, p) - DyDc).inverse();
    const Matrix DcW = k.D_c * cl.W;
    cl.A_hat.resize(n + s, n + s);
    cl.A_hat.topLeftCorner(n, n) = sys.A + sys.B * DcW * sys.C;
    cl.A_hat.topRightCorner(n, s) = sys.B * k.C_c + sys.B * DcW * sys.D_y * k.C_c;
    cl.A_hat.bottomLeftCorner(s, n) = k.B_c * cl.W * sys.C;
    cl.A_hat.bottomRightCorner(s, s) = k.A_c + k.B_c * cl.W * sys.D_y * k.C_c;
    cl.H_hat.resize(n + s, sys.q());
    cl.H_hat.topRows(n) = sys.H + sys.B * DcW * sys.G_y;
    cl.H_hat.bottomRows(s) = k.B_c * cl.W * sys.G_y;
    cl.C_hat.resize(sys.r(), n + s);
    cl.C_hat.leftCols(n) = sys.E + sys.D_z * DcW * sys.C;
    cl.C_hat.rightCols(s) = sys.D_z * k.C_c + sys.D_z * DcW * sys.D_y * k.C_c;
    cl.G_hat = sys.G_z + sys.D_z * DcW * sys.G_y;
    return cl;
}

}  // namespace ddp
