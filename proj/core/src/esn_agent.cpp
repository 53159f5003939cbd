#include "esnrls/esn_agent.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace esnrls {

double mellowmax(const RowVector& q_row, double omega, double c) {
    if (!(omega > 0.0)) throw std::invalid_argument("mellowmax: omega must be positive");
    const auto n = q_row.size();
    if (n == 0) throw std::invalid_argument("mellowmax: empty action row");
    // Rebase the exponent so the sum cannot overflow for finite inputs.
    double peak = -std::numeric_limits<double>::infinity();
    for (auto i = 0; i < n; ++i) peak = std::max(peak, omega * (q_row[i] - c));
    double sum = 0.0;
    for (auto i = 0; i < n; ++i) sum += std::exp(omega * (q_row[i] - c) - peak);
    return (peak + std::log(sum / static_cast<double>(n))) / omega + c;
}

namespace {

int argmax_lowest(const RowVector& q) {
    int best = 0;
    for (int i = 1; i < q.size(); ++i)
        if (q[i] > q[best]) best = i;
    return best;
}

}  // namespace

EsnAgent::EsnAgent(const ReservoirConfig& config, const EsnAgentOptions& options,
                   std::uint64_t reservoir_seed, std::uint64_t theta_seed)
    : config_(config),
      options_(options),
      reservoir_seed_(reservoir_seed),
      reservoir_(init_reservoir(config, reservoir_seed)),
      rls_(make_rls_state(config.feature_dim(), options.p0_scale, options.lambda, options.kappa)),
      online_h_(RowVector::Zero(config.reservoir_size)) {
    Rng theta_rng = substream(theta_seed, "theta_init");
    theta_policy_.theta.resize(config.feature_dim(), options.num_actions);
    for (Eigen::Index r = 0; r < theta_policy_.theta.rows(); ++r)
        for (Eigen::Index c = 0; c < theta_policy_.theta.cols(); ++c)
            theta_policy_.theta(r, c) = theta_rng.uniform(-options.theta_init_scale, options.theta_init_scale);
    theta_target_ = theta_policy_;
}

void EsnAgent::begin_episode() {
    online_h_.setZero();
    steps_since_episode_start_ = 0;
}

int EsnAgent::act(const Vector& observation, Rng& rng) {
    if (observation.size() != config_.input_dim) throw std::invalid_argument("act: observation width mismatch");
    if (options_.hidden_reset == HiddenReset::series_aligned &&
        steps_since_episode_start_ % options_.series_len == 0)
        online_h_.setZero();
    online_h_ = reservoir_step(reservoir_, config_, online_h_, observation.transpose());
    ++steps_since_episode_start_;

    RowVector u(config_.feature_dim());
    u << observation.transpose(), online_h_, 1.0;
    const RowVector q = u * theta_policy_.theta;
    if (rng.uniform01() < options_.epsilon) return rng.uniform_int(options_.num_actions);
    return argmax_lowest(q);
}

TargetBatch EsnAgent::compute_targets(std::span<const TransitionSeries> minibatch) const {
    const std::size_t m = minibatch.size();
    if (m == 0) throw std::invalid_argument("compute_targets: empty minibatch");
    const std::size_t t = minibatch.front().steps.size();

    std::vector<Matrix> next_states(t, Matrix(static_cast<Eigen::Index>(m), config_.input_dim));
    for (std::size_t k = 0; k < t; ++k)
        for (std::size_t i = 0; i < m; ++i)
            next_states[k].row(static_cast<Eigen::Index>(i)) = minibatch[i].steps[k].s_next.transpose();

    std::vector<Matrix> hidden;
    if (options_.target_chain == TargetChain::zero_init) {
        // Independent chain over the next-state series from the zero state.
        hidden = batch_reservoir_forward(reservoir_, config_, next_states);
    } else {
        // One step past the policy-side chain: Q(s'_k) is read from the same
        // features the policy pairs with that state at position k+1.
        std::vector<Matrix> states(t, Matrix(static_cast<Eigen::Index>(m), config_.input_dim));
        for (std::size_t k = 0; k < t; ++k)
            for (std::size_t i = 0; i < m; ++i)
                states[k].row(static_cast<Eigen::Index>(i)) = minibatch[i].steps[k].s.transpose();
        const std::vector<Matrix> policy_chain = batch_reservoir_forward(reservoir_, config_, states);
        hidden.reserve(t);
        for (std::size_t k = 0; k < t; ++k)
            hidden.push_back(advance_hidden(reservoir_, config_, policy_chain[k], next_states[k]));
    }

    TargetBatch out;
    out.q_pi.assign(t, Matrix::Zero(static_cast<Eigen::Index>(m), options_.num_actions));
    out.actions.assign(t, std::vector<int>(m, 0));
    for (std::size_t k = 0; k < t; ++k) {
        const Matrix q_next = readout(theta_target_, build_regressor(next_states[k], hidden[k]));
        for (std::size_t i = 0; i < m; ++i) {
            const Transition& tr = minibatch[i].steps[k];
            double y = tr.r;
            if (!tr.terminal) {
                const RowVector q_row = q_next.row(static_cast<Eigen::Index>(i));
                const double shift =
                    options_.kind == ControlKind::q_learning ? q_row.maxCoeff() : q_row[tr.a_next];
                y += options_.gamma * mellowmax(q_row, options_.omega, shift);
            }
            out.q_pi[k](static_cast<Eigen::Index>(i), tr.a) = y;
            out.actions[k][i] = tr.a;
        }
    }
    return out;
}

void EsnAgent::train_step(std::span<const TransitionSeries> minibatch) {
    const std::size_t m = minibatch.size();
    if (m == 0) throw std::invalid_argument("train_step: empty minibatch");
    const std::size_t t = minibatch.front().steps.size();

    std::vector<Matrix> states(t, Matrix(static_cast<Eigen::Index>(m), config_.input_dim));
    for (std::size_t k = 0; k < t; ++k)
        for (std::size_t i = 0; i < m; ++i)
            states[k].row(static_cast<Eigen::Index>(i)) = minibatch[i].steps[k].s.transpose();

    const std::vector<Matrix> hidden = batch_reservoir_forward(reservoir_, config_, states);
    const TargetBatch targets = compute_targets(minibatch);

    std::vector<Matrix> u_series(t);
    for (std::size_t k = 0; k < t; ++k) u_series[k] = build_regressor(states[k], hidden[k]);

    if (options_.mean_scope == MeanScope::batch) {
        std::vector<Matrix> q_pred(t);
        for (std::size_t k = 0; k < t; ++k)
            q_pred[k] = mask_to_actions(readout(theta_policy_, u_series[k]), targets.actions[k]);
        const Vector u_bar = mean_features(u_series);
        const Vector q_pi_bar = mean_targets(targets.q_pi);
        const Vector q_bar = mean_targets(q_pred);
        rls_update(rls_, theta_policy_, u_bar, q_pi_bar, q_bar);
        return;
    }

    // Per-series means, each scaled by 1/sqrt(M) so the M rank-one additions
    // jointly contribute the (1/M)-averaged outer products of one train step.
    // Predictions are recomputed against the advancing theta.
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    const double inv_t = 1.0 / static_cast<double>(t);
    for (std::size_t i = 0; i < m; ++i) {
        Vector u_bar = Vector::Zero(config_.feature_dim());
        Vector q_pi_bar = Vector::Zero(options_.num_actions);
        Vector q_bar = Vector::Zero(options_.num_actions);
        for (std::size_t k = 0; k < t; ++k) {
            const auto row = u_series[k].row(static_cast<Eigen::Index>(i));
            u_bar += row.transpose();
            q_pi_bar += targets.q_pi[k].row(static_cast<Eigen::Index>(i)).transpose();
            const int a = targets.actions[k][i];
            q_bar[a] += row * theta_policy_.theta.col(a);
        }
        u_bar *= scale * inv_t;
        q_pi_bar *= scale * inv_t;
        q_bar *= scale * inv_t;
        rls_update_with(rls_, theta_policy_, u_bar, q_pi_bar, q_bar, i == 0 ? options_.lambda : 1.0,
                        i == 0 ? options_.kappa : 0.0);
    }
}

void EsnAgent::sync_target() { theta_target_ = theta_policy_; }

}  // namespace esnrls
