#include "oracles.hpp"

#include <stdexcept>

#include "esnrls/rng.hpp"

namespace esnrls::test {

NormalEquationOracle::NormalEquationOracle(const Matrix& theta0, double p0_scale, double lambda)
    : lambda_(lambda) {
    const auto dim = theta0.rows();
    a_ = Matrix::Identity(dim, dim) / p0_scale;
    b_ = a_ * theta0;
}

void NormalEquationOracle::step(const Vector& u, int action, double target) {
    const Matrix theta_prev = theta();
    Vector z = theta_prev.transpose() * u;  // predictions as pseudo-targets
    z[action] = target;
    a_ = lambda_ * a_ + u * u.transpose();
    b_ = lambda_ * b_ + u * z.transpose();
}

Matrix NormalEquationOracle::theta() const { return a_.inverse() * b_; }

Matrix direct_solve_masked(std::span<const MaskedSeries> history, double lambda) {
    if (history.empty()) throw std::invalid_argument("direct_solve_masked: empty history");
    const auto dim = history.front().u.front().cols();
    const auto num_actions = history.front().q_pi.front().cols();
    Matrix theta(dim, num_actions);
    const auto t = history.size();
    for (Eigen::Index action = 0; action < num_actions; ++action) {
        Matrix a = Matrix::Zero(dim, dim);
        Vector b = Vector::Zero(dim);
        for (std::size_t n = 0; n < t; ++n) {
            const double weight = std::pow(lambda, static_cast<double>(t - 1 - n));
            const MaskedSeries& batch = history[n];
            for (std::size_t k = 0; k < batch.u.size(); ++k)
                for (Eigen::Index i = 0; i < batch.u[k].rows(); ++i) {
                    if (batch.actions[k][static_cast<std::size_t>(i)] != action) continue;
                    const Vector row = batch.u[k].row(i).transpose();
                    a += weight * (row * row.transpose());
                    b += weight * row * batch.q_pi[k](i, action);
                }
        }
        theta.col(action) = a.inverse() * b;
    }
    return theta;
}

Matrix finite_difference_gradient(const OutputParams& theta, std::span<const MaskedSeries> history,
                                  double lambda, double step) {
    Matrix grad(theta.theta.rows(), theta.theta.cols());
    OutputParams probe = theta;
    for (Eigen::Index r = 0; r < grad.rows(); ++r)
        for (Eigen::Index c = 0; c < grad.cols(); ++c) {
            const double original = probe.theta(r, c);
            probe.theta(r, c) = original + step;
            const double up = batch_loss(probe, history, lambda);
            probe.theta(r, c) = original - step;
            const double down = batch_loss(probe, history, lambda);
            probe.theta(r, c) = original;
            grad(r, c) = (up - down) / (2.0 * step);
        }
    return grad;
}

std::vector<MaskedSeries> random_history(int steps, int m, int t_len, int dim, int num_actions,
                                         std::uint64_t seed) {
    Rng rng(seed);
    std::vector<MaskedSeries> history(static_cast<std::size_t>(steps));
    for (MaskedSeries& batch : history) {
        batch.u.assign(static_cast<std::size_t>(t_len), Matrix(m, dim));
        batch.q_pi.assign(static_cast<std::size_t>(t_len), Matrix::Zero(m, num_actions));
        batch.actions.assign(static_cast<std::size_t>(t_len), std::vector<int>(static_cast<std::size_t>(m)));
        for (int k = 0; k < t_len; ++k) {
            for (int i = 0; i < m; ++i) {
                for (int d = 0; d < dim; ++d) batch.u[static_cast<std::size_t>(k)](i, d) = rng.uniform(-1.0, 1.0);
                const int action = rng.uniform_int(num_actions);
                batch.actions[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] = action;
                batch.q_pi[static_cast<std::size_t>(k)](i, action) = rng.uniform(-2.0, 2.0);
            }
        }
    }
    return history;
}

}  // namespace esnrls::test
