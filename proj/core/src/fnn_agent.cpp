#include "esnrls/fnn_agent.hpp"

#include <cmath>
#include <stdexcept>

#include "esnrls/rls.hpp"
#include "esnrls/rng.hpp"

namespace esnrls {

namespace {

void fill_uniform(Matrix& m, double bound, Rng& rng) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            m(r, c) = rng.uniform(-bound, bound);
}

FnnParams zeros_like(const FnnParams& p) {
    FnnParams z;
    z.w1 = Matrix::Zero(p.w1.rows(), p.w1.cols());
    z.b1 = Vector::Zero(p.b1.size());
    z.w2 = Matrix::Zero(p.w2.rows(), p.w2.cols());
    z.b2 = Vector::Zero(p.b2.size());
    return z;
}

template <typename Block>
void adam_block(Block& param, Block& m, Block& v, const Block& g, const AdamConfig& c,
                double m_corr, double v_corr) {
    m = c.beta1 * m + (1.0 - c.beta1) * g;
    v = c.beta2 * v + (1.0 - c.beta2) * g.cwiseProduct(g);
    param.array() -= c.alpha * (m.array() / m_corr) / ((v.array() / v_corr).sqrt() + c.epsilon);
}

}  // namespace

FnnParams init_fnn(int input_dim, int hidden, int num_actions, std::uint64_t seed) {
    FnnParams p;
    p.w1.resize(input_dim, hidden);
    p.w2.resize(hidden, num_actions);
    p.b1 = Vector::Zero(hidden);
    p.b2 = Vector::Zero(num_actions);
    Rng rng1 = substream(seed, "fnn_w1");
    fill_uniform(p.w1, 1.0 / std::sqrt(static_cast<double>(input_dim)), rng1);
    Rng rng2 = substream(seed, "fnn_w2");
    fill_uniform(p.w2, 1.0 / std::sqrt(static_cast<double>(hidden)), rng2);
    return p;
}

AdamState make_adam_state(const FnnParams& params, const AdamConfig& config) {
    AdamState s;
    s.m = zeros_like(params);
    s.v = zeros_like(params);
    s.t = 0;
    s.config = config;
    return s;
}

Matrix fnn_forward(const FnnParams& params, const Matrix& x_batch) {
    if (x_batch.cols() != params.w1.rows()) throw std::invalid_argument("fnn_forward: input width mismatch");
    Matrix a1 = (x_batch * params.w1).rowwise() + params.b1.transpose();
    a1 = a1.cwiseMax(0.0);
    return (a1 * params.w2).rowwise() + params.b2.transpose();
}

FnnLossResult fnn_loss_and_grads(const FnnParams& params, const Matrix& x_batch,
                                 const Matrix& masked_targets, std::span<const int> actions) {
    const auto m = x_batch.rows();
    if (m == 0) throw std::invalid_argument("fnn_loss_and_grads: empty batch");
    const Matrix z1 = (x_batch * params.w1).rowwise() + params.b1.transpose();
    const Matrix a1 = z1.cwiseMax(0.0);
    const Matrix q = (a1 * params.w2).rowwise() + params.b2.transpose();

    const Matrix delta = masked_targets - mask_to_actions(q, actions);
    FnnLossResult out;
    out.loss = delta.squaredNorm() / (2.0 * static_cast<double>(m));

    const Matrix dq = -delta / static_cast<double>(m);  // dL/dQ, zero off the taken actions
    out.grads.w2.noalias() = a1.transpose() * dq;
    out.grads.b2 = dq.colwise().sum().transpose();
    Matrix da1 = dq * params.w2.transpose();
    da1 = (z1.array() > 0.0).select(da1, 0.0);
    out.grads.w1.noalias() = x_batch.transpose() * da1;
    out.grads.b1 = da1.colwise().sum().transpose();
    return out;
}

void adam_step(AdamState& adam, FnnParams& params, const FnnParams& grads) {
    adam.t += 1;
    const double m_corr = 1.0 - std::pow(adam.config.beta1, static_cast<double>(adam.t));
    const double v_corr = 1.0 - std::pow(adam.config.beta2, static_cast<double>(adam.t));
    adam_block(params.w1, adam.m.w1, adam.v.w1, grads.w1, adam.config, m_corr, v_corr);
    adam_block(params.b1, adam.m.b1, adam.v.b1, grads.b1, adam.config, m_corr, v_corr);
    adam_block(params.w2, adam.m.w2, adam.v.w2, grads.w2, adam.config, m_corr, v_corr);
    adam_block(params.b2, adam.m.b2, adam.v.b2, grads.b2, adam.config, m_corr, v_corr);
}

FnnAgent::FnnAgent(int input_dim, const FnnAgentOptions& options, std::uint64_t weight_seed)
    : input_dim_(input_dim),
      options_(options),
      params_(init_fnn(input_dim, options.hidden, options.num_actions, weight_seed)),
      target_(params_),
      adam_(make_adam_state(params_, options.adam)) {}

int FnnAgent::act(const Vector& observation, Rng& rng) {
    if (observation.size() != input_dim_) throw std::invalid_argument("act: observation width mismatch");
    const Matrix q = fnn_forward(params_, observation.transpose());
    if (rng.uniform01() < options_.epsilon) return rng.uniform_int(options_.num_actions);
    int best = 0;
    for (int i = 1; i < options_.num_actions; ++i)
        if (q(0, i) > q(0, best)) best = i;
    return best;
}

void FnnAgent::train_step(std::span<const TransitionSeries> minibatch) {
    const std::vector<Transition> flat = flatten_non_fill(minibatch);
    train_on_transitions(flat);
}

void FnnAgent::train_on_transitions(std::span<const Transition> batch) {
    const auto m = static_cast<Eigen::Index>(batch.size());
    if (m == 0) throw std::invalid_argument("train_on_transitions: empty batch");
    Matrix x(m, input_dim_);
    Matrix x_next(m, input_dim_);
    for (Eigen::Index i = 0; i < m; ++i) {
        x.row(i) = batch[static_cast<std::size_t>(i)].s.transpose();
        x_next.row(i) = batch[static_cast<std::size_t>(i)].s_next.transpose();
    }
    const Matrix q_next = fnn_forward(target_, x_next);

    Matrix targets = Matrix::Zero(m, options_.num_actions);
    std::vector<int> actions(batch.size());
    for (Eigen::Index i = 0; i < m; ++i) {
        const Transition& tr = batch[static_cast<std::size_t>(i)];
        double y = tr.r;
        if (!tr.terminal) {
            const double next_value = options_.kind == ControlKind::q_learning
                                          ? q_next.row(i).maxCoeff()
                                          : q_next(i, tr.a_next);
            y += options_.gamma * next_value;
        }
        targets(i, tr.a) = y;
        actions[static_cast<std::size_t>(i)] = tr.a;
    }

    const FnnLossResult result = fnn_loss_and_grads(params_, x, targets, actions);
    adam_step(adam_, params_, result.grads);
    if (!params_.w1.allFinite() || !params_.w2.allFinite() || !params_.b1.allFinite() || !params_.b2.allFinite())
        throw DivergenceError("FnnAgent: non-finite parameters after update");
}

void FnnAgent::sync_target() { target_ = params_; }

}  // namespace esnrls
