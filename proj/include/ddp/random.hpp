#pragma once

// Seeded pseudo-random source. Distributions are computed by hand from the
// raw mt19937_64 stream so results do not depend on the standard library.

#include <cmath>
#include <cstdint>
#include <random>

#include "ddp/linalg.hpp"

namespace ddp {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// uniform in [0,1)
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// integer in [lo, hi]
    int integer(int lo, int hi)
    {
        const auto span = static_cast<std::uint64_t>(hi - lo + 1);
        return lo + static_cast<int>(eng_() % span);
    }

    double normal()
    {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * M_PI * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

    Matrix normal_matrix(Index rows, Index cols)
    {
        Matrix M(rows, cols);
        for (Index j = 0; j < cols; ++j)
            for (Index i = 0; i < rows; ++i) M(i, j) = normal();
        return M;
    }

    Matrix integer_matrix(Index rows, Index cols, int lo, int hi)
    {
        Matrix M(rows, cols);
        for (Index j = 0; j < cols; ++j)
            for (Index i = 0; i < rows; ++i) M(i, j) = integer(lo, hi);
        return M;
    }

    /// Haar-ish random orthogonal matrix (QR of a Gaussian matrix, sign fixed).
    Matrix orthogonal(Index n)
    {
        if (n == 0) return Matrix(0, 0);
        const Matrix G = normal_matrix(n, n);
        Eigen::HouseholderQR<Matrix> qr(G);
        Matrix Q = qr.householderQ() * Matrix::Identity(n, n);
        const Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
        for (Index i = 0; i < n; ++i)
            if (R(i, i) < 0) Q.col(i) = -Q.col(i);
        return Q;
    }

    std::uint64_t next_u64() { return eng_(); }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace ddp
