#include "esnrls/numerics.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

namespace esnrls {

RankOneUpdateResult rank_one_inverse_update(const Matrix& p, const Vector& u, double lambda) {
    if (p.rows() != p.cols()) throw std::invalid_argument("rank_one_inverse_update: p must be square");
    if (u.size() != p.rows()) throw std::invalid_argument("rank_one_inverse_update: dim(u) != dim(p)");
    if (!(lambda > 0.0)) throw std::invalid_argument("rank_one_inverse_update: lambda must be positive");

    RankOneUpdateResult r;
    r.v.noalias() = p * u;
    const double denom = lambda + r.v.dot(u);
    r.g = r.v / denom;
    r.p_next.noalias() = p - r.g * r.v.transpose();
    r.p_next /= lambda;
    r.p_next = ((r.p_next + r.p_next.transpose()) / 2.0).eval();
    if (!r.p_next.allFinite() || !r.g.allFinite())
        throw DivergenceError("rank_one_inverse_update: non-finite result");
    return r;
}

namespace {

constexpr int kMaxMatvecs = 10000;
constexpr double kConvergenceTol = 1e-10;

}  // namespace

// Restarted Arnoldi: repeated power steps kept orthogonal so each cycle sees
// a whole Krylov subspace instead of a single direction. Plain power
// iteration stalls on reservoir-sized random matrices whose leading moduli
// cluster within a fraction of a percent; the subspace form converges there
// with the same matvec budget. For n <= subspace size one cycle reduces the
// whole matrix, so small inputs are solved exactly.
double spectral_radius(const Matrix& w) {
    if (w.rows() != w.cols()) throw std::invalid_argument("spectral_radius: matrix must be square");
    const auto n = w.rows();
    if (n == 0 || w.isZero(0.0)) throw std::invalid_argument("spectral_radius: undefined for a zero matrix");

    // Deterministic start vector; the fixed internal stream keeps results
    // reproducible independent of any caller state.
    std::mt19937_64 gen(0x5eed5eedULL);
    Vector start(n);
    for (auto i = 0; i < n; ++i)
        start[i] = static_cast<double>(gen() >> 11) * 0x1.0p-52 - 1.0;
    if (start.norm() == 0.0) start.setOnes();
    start.normalize();

    const auto m = std::min<Eigen::Index>(n, 64);
    Matrix basis(n, m + 1);
    Matrix hess = Matrix::Zero(m + 1, m);

    int matvecs = 0;
    double estimate = 0.0;
    bool have_estimate = false;
    while (matvecs < kMaxMatvecs) {
        basis.col(0) = start;
        hess.setZero();
        Eigen::Index steps = m;
        bool invariant = false;
        for (Eigen::Index j = 0; j < m; ++j) {
            Vector next = w * basis.col(j);
            ++matvecs;
            for (int pass = 0; pass < 2; ++pass) {  // classical GS, repeated once
                for (Eigen::Index i = 0; i <= j; ++i) {
                    const double h = basis.col(i).dot(next);
                    next -= h * basis.col(i);
                    hess(i, j) += h;
                }
            }
            const double h_next = next.norm();
            if (h_next <= 1e-14 * std::max(1.0, hess.topLeftCorner(j + 1, j + 1).norm())) {
                steps = j + 1;  // invariant subspace: its Ritz values are exact
                invariant = true;
                break;
            }
            hess(j + 1, j) = h_next;
            basis.col(j + 1) = next / h_next;
        }

        const Matrix h_square = hess.topLeftCorner(steps, steps);
        Eigen::EigenSolver<Matrix> ritz(h_square, /*computeEigenvectors=*/true);
        Eigen::Index dominant = 0;
        ritz.eigenvalues().cwiseAbs().maxCoeff(&dominant);
        const double candidate = std::abs(ritz.eigenvalues()[dominant]);

        if (invariant || (have_estimate &&
                          std::abs(candidate - estimate) <= kConvergenceTol * std::max(1.0, candidate)))
            return candidate;
        estimate = candidate;
        have_estimate = true;

        // Restart toward the dominant Ritz direction.
        const Eigen::VectorXcd y = ritz.eigenvectors().col(dominant);
        Vector restart = basis.leftCols(steps) * y.real();
        if (restart.norm() <= 1e-12) restart = basis.leftCols(steps) * y.imag();
        if (restart.norm() <= 1e-12) restart = basis.col(0);
        start = restart.normalized();
    }
    throw std::runtime_error("spectral_radius: iteration budget exhausted before convergence");
}

Matrix spectral_scale(const Matrix& w, double target) {
    if (!(target > 0.0)) throw std::invalid_argument("spectral_scale: target must be positive");
    const double radius = spectral_radius(w);  // throws on a zero matrix
    if (radius == 0.0) throw std::invalid_argument("spectral_scale: input has zero spectral radius");
    return w * (target / radius);
}

}  // namespace esnrls
