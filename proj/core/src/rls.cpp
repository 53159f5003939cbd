#include "esnrls/rls.hpp"

#include <cmath>

#include "esnrls/numerics.hpp"

namespace esnrls {

RlsState make_rls_state(int dim, double p0_scale, double lambda, double kappa) {
    if (dim < 1) throw std::invalid_argument("make_rls_state: dim must be >= 1");
    if (!(lambda > 0.0 && lambda <= 1.0)) throw std::invalid_argument("make_rls_state: lambda must be in (0,1]");
    if (kappa < 0.0) throw std::invalid_argument("make_rls_state: kappa must be >= 0");
    return RlsState{Matrix::Identity(dim, dim) * p0_scale, lambda, kappa};
}

Matrix mask_to_actions(const Matrix& q_full, std::span<const int> actions) {
    if (static_cast<std::size_t>(q_full.rows()) != actions.size())
        throw std::invalid_argument("mask_to_actions: row/action count mismatch");
    Matrix masked = Matrix::Zero(q_full.rows(), q_full.cols());
    for (Eigen::Index i = 0; i < q_full.rows(); ++i)
        masked(i, actions[static_cast<std::size_t>(i)]) = q_full(i, actions[static_cast<std::size_t>(i)]);
    return masked;
}

namespace {

Vector mean_rows(std::span<const Matrix> series) {
    if (series.empty()) throw std::invalid_argument("mean over an empty series");
    const auto cols = series.front().cols();
    Vector sum = Vector::Zero(cols);
    std::int64_t rows = 0;
    for (const Matrix& m : series) {
        if (m.cols() != cols) throw std::invalid_argument("mean over inconsistently shaped series");
        sum += m.colwise().sum().transpose();
        rows += m.rows();
    }
    if (rows == 0) throw std::invalid_argument("mean over an empty series");
    return sum / static_cast<double>(rows);
}

double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

Vector mean_features(std::span<const Matrix> u_series) { return mean_rows(u_series); }

Vector mean_targets(std::span<const Matrix> q_matrix_series) { return mean_rows(q_matrix_series); }

void rls_update(RlsState& state, OutputParams& theta, const Vector& u_bar,
                const Vector& q_pi_bar, const Vector& q_bar) {
    rls_update_with(state, theta, u_bar, q_pi_bar, q_bar, state.lambda, state.kappa);
}

void rls_update_with(RlsState& state, OutputParams& theta, const Vector& u_bar,
                     const Vector& q_pi_bar, const Vector& q_bar, double lambda, double kappa) {
    if (theta.theta.rows() != state.p.rows() || u_bar.size() != state.p.rows())
        throw std::invalid_argument("rls_update: dimension mismatch");
    // v, g and the advanced P in one pass; theta sees the PRIOR P through g
    // and the shrinkage term.
    RankOneUpdateResult r = rank_one_inverse_update(state.p, u_bar, lambda);
    if (kappa != 0.0) {
        const Matrix sgn = theta.theta.unaryExpr([](double x) { return sign_of(x); });
        theta.theta -= kappa * (state.p * sgn);
    }
    theta.theta.noalias() += r.g * (q_pi_bar - q_bar).transpose();
    state.p = std::move(r.p_next);
    if (!theta.theta.allFinite()) throw DivergenceError("rls_update: non-finite theta");
}

double batch_loss(const OutputParams& theta, std::span<const MaskedSeries> history, double lambda) {
    if (history.empty()) throw std::invalid_argument("batch_loss: empty history");
    const auto t = history.size();
    double loss = 0.0;
    for (std::size_t n = 0; n < t; ++n) {
        const MaskedSeries& batch = history[n];
        const double weight = std::pow(lambda, static_cast<double>(t - 1 - n));
        const auto rows = batch.u.empty() ? 0 : batch.u.front().rows();
        const double mt = static_cast<double>(batch.u.size()) * static_cast<double>(rows);
        double sq = 0.0;
        for (std::size_t k = 0; k < batch.u.size(); ++k) {
            const Matrix pred = mask_to_actions(readout(theta, batch.u[k]), batch.actions[k]);
            sq += (batch.q_pi[k] - pred).squaredNorm();
        }
        loss += weight * sq / (2.0 * mt);
    }
    return loss;
}

Matrix loss_gradient(const OutputParams& theta, std::span<const MaskedSeries> history, double lambda) {
    if (history.empty()) throw std::invalid_argument("loss_gradient: empty history");
    const auto t = history.size();
    Matrix grad = Matrix::Zero(theta.theta.rows(), theta.theta.cols());
    for (std::size_t n = 0; n < t; ++n) {
        const MaskedSeries& batch = history[n];
        const double weight = std::pow(lambda, static_cast<double>(t - 1 - n));
        const auto rows = batch.u.empty() ? 0 : batch.u.front().rows();
        const double mt = static_cast<double>(batch.u.size()) * static_cast<double>(rows);
        for (std::size_t k = 0; k < batch.u.size(); ++k) {
            const Matrix pred = mask_to_actions(readout(theta, batch.u[k]), batch.actions[k]);
            const Matrix delta = batch.q_pi[k] - pred;
            grad.noalias() -= (weight / mt) * (batch.u[k].transpose() * delta);
        }
    }
    return grad;
}

}  // namespace esnrls
