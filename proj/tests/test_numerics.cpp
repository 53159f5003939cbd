#include "esnrls/numerics.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "esnrls/rng.hpp"

namespace esnrls {
namespace {

Matrix random_matrix(int n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
    Rng rng(seed);
    Matrix m(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) m(r, c) = rng.uniform(lo, hi);
    return m;
}

Matrix random_spd(int n, std::uint64_t seed) {
    const Matrix r = random_matrix(n, seed);
    return r * r.transpose() + 0.1 * Matrix::Identity(n, n);
}

// Dense oracle: all eigenvalues via Eigen's real Schur path.
double dense_spectral_radius(const Matrix& m) {
    Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

TEST(RankOneInverseUpdate, ZeroVectorOnlyRescales) {
    const Matrix p = 0.4 * Matrix::Identity(2, 2);
    const Vector u = Vector::Zero(2);
    const auto r = rank_one_inverse_update(p, u, 1.0);
    EXPECT_TRUE(r.p_next.isApprox(p, 1e-15));
    EXPECT_TRUE(r.g.isZero(0.0));
}

TEST(RankOneInverseUpdate, IdentityPlusBasisVector) {
    const Matrix p = Matrix::Identity(2, 2);
    Vector u(2);
    u << 1.0, 0.0;
    const auto r = rank_one_inverse_update(p, u, 1.0);
    Matrix expected(2, 2);
    expected << 0.5, 0.0, 0.0, 1.0;
    EXPECT_TRUE(r.p_next.isApprox(expected, 1e-14));
}

TEST(RankOneInverseUpdate, MatchesExplicitTwoByTwoInverse) {
    const double lambda = 0.99999;
    const Matrix p = 0.4 * Matrix::Identity(2, 2);
    Vector u(2);
    u << 1.0, 1.0;
    const auto r = rank_one_inverse_update(p, u, lambda);
    const Matrix a = lambda * p.inverse() + u * u.transpose();
    EXPECT_LT((r.p_next - a.inverse()).norm(), 1e-10);
}

TEST(RankOneInverseUpdate, GainFormula) {
    const Matrix p = random_spd(5, 21);
    Rng rng(22);
    Vector u(5);
    for (int i = 0; i < 5; ++i) u[i] = rng.uniform(-1.0, 1.0);
    const double lambda = 0.9;
    const auto r = rank_one_inverse_update(p, u, lambda);
    const Vector v = p * u;
    EXPECT_TRUE(r.v.isApprox(v, 1e-14));
    EXPECT_TRUE(r.g.isApprox(v / (lambda + v.dot(u)), 1e-14));
}

TEST(RankOneInverseUpdate, InverseIdentityPropertyAcrossDims) {
    for (int dim : {1, 2, 3, 5, 8, 16}) {
        for (std::uint64_t seed : {100, 101, 102}) {
            const Matrix p = random_spd(dim, seed).inverse();
            Rng rng(seed + 9000);
            Vector u(dim);
            for (int i = 0; i < dim; ++i) u[i] = rng.uniform(-1.0, 1.0);
            for (double lambda : {1.0, 0.99, 0.5}) {
                const auto r = rank_one_inverse_update(p, u, lambda);
                const Matrix a_next = lambda * p.inverse() + u * u.transpose();
                const Matrix product = r.p_next * a_next;
                const double err = (product - Matrix::Identity(dim, dim)).norm() /
                                   Matrix::Identity(dim, dim).norm();
                EXPECT_LT(err, 1e-8) << "dim " << dim << " seed " << seed << " lambda " << lambda;
            }
        }
    }
}

TEST(RankOneInverseUpdate, StaysSymmetricPositiveDefinite) {
    Matrix p = 0.4 * Matrix::Identity(6, 6);
    Rng rng(31);
    for (int step = 0; step < 200; ++step) {
        Vector u(6);
        for (int i = 0; i < 6; ++i) u[i] = rng.uniform(-1.0, 1.0);
        p = rank_one_inverse_update(p, u, 0.999).p_next;
        EXPECT_LT((p - p.transpose()).norm(), 1e-9 * std::max(1.0, p.norm()));
        const Eigen::SelfAdjointEigenSolver<Matrix> eig(p);
        EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
    }
}

TEST(RankOneInverseUpdate, RejectsBadArguments) {
    const Matrix p = Matrix::Identity(3, 3);
    EXPECT_THROW(rank_one_inverse_update(p, Vector::Zero(2), 1.0), std::invalid_argument);
    EXPECT_THROW(rank_one_inverse_update(p, Vector::Zero(3), 0.0), std::invalid_argument);
    EXPECT_THROW(rank_one_inverse_update(Matrix::Zero(2, 3), Vector::Zero(3), 1.0), std::invalid_argument);
}

TEST(SpectralRadius, PermutationPair) {
    Matrix w(2, 2);
    w << 0.0, 1.0, 1.0, 0.0;
    EXPECT_NEAR(spectral_radius(w), 1.0, 1e-10);
}

TEST(SpectralRadius, ScalarMatrix) {
    EXPECT_NEAR(spectral_radius(2.0 * Matrix::Identity(3, 3)), 2.0, 1e-10);
}

TEST(SpectralRadius, MatchesDenseOracleOnRandom16) {
    for (std::uint64_t seed : {1, 2, 3, 4, 5, 6, 7, 8}) {
        const Matrix w = random_matrix(16, seed);
        const double expected = dense_spectral_radius(w);
        EXPECT_NEAR(spectral_radius(w), expected, 1e-6 * expected) << "seed " << seed;
    }
}

TEST(SpectralRadius, ComplexDominantPair) {
    // Block diagonal: rotation scaled by 1.5 (complex pair of modulus 1.5)
    // plus a real eigenvalue 0.7.
    Matrix w = Matrix::Zero(3, 3);
    const double angle = 0.7;
    w(0, 0) = 1.5 * std::cos(angle);
    w(0, 1) = -1.5 * std::sin(angle);
    w(1, 0) = 1.5 * std::sin(angle);
    w(1, 1) = 1.5 * std::cos(angle);
    w(2, 2) = 0.7;
    EXPECT_NEAR(spectral_radius(w), 1.5, 1e-8);
}

TEST(SpectralRadius, RejectsZeroMatrix) {
    EXPECT_THROW(spectral_radius(Matrix::Zero(4, 4)), std::invalid_argument);
}

TEST(SpectralScale, PermutationToTarget) {
    Matrix w(2, 2);
    w << 0.0, 1.0, 1.0, 0.0;
    Matrix expected(2, 2);
    expected << 0.0, 0.95, 0.95, 0.0;
    EXPECT_TRUE(spectral_scale(w, 0.95).isApprox(expected, 1e-9));
}

TEST(SpectralScale, IdentityToHalf) {
    EXPECT_TRUE(spectral_scale(Matrix::Identity(2, 2), 0.5).isApprox(0.5 * Matrix::Identity(2, 2), 1e-12));
}

TEST(SpectralScale, SparseRandom256HitsTarget) {
    Rng rng(404);
    Matrix w = Matrix::Zero(256, 256);
    // ~25% density without replacement semantics not needed here; any sparse
    // pattern exercises the measurement.
    for (int i = 0; i < 256 * 256 / 4; ++i)
        w(rng.uniform_int(256), rng.uniform_int(256)) = rng.uniform(-1.0, 1.0);
    const Matrix scaled = spectral_scale(w, 0.95);
    EXPECT_NEAR(spectral_radius(scaled), 0.95, 1e-6);
}

TEST(SpectralScale, IdempotentAtTarget) {
    const Matrix w = random_matrix(16, 77);
    const Matrix once = spectral_scale(w, 0.95);
    const Matrix twice = spectral_scale(once, 0.95);
    EXPECT_LT((twice - once).norm(), 1e-6);
}

}  // namespace
}  // namespace esnrls
