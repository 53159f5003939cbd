#pragma once

#include <cstdint>
#include <span>

#include "esnrls/agent.hpp"
#include "esnrls/types.hpp"

namespace esnrls {

// One hidden rectifier layer, linear output; the comparison network.
struct FnnParams {
    Matrix w1;  // input_dim x hidden
    Vector b1;  // hidden
    Matrix w2;  // hidden x num_actions
    Vector b2;  // num_actions
};

struct AdamConfig {
    double alpha = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    FnnParams m;  // first moments, zero-initialized
    FnnParams v;  // second moments, zero-initialized
    long t = 0;
    AdamConfig config;
};

/// Weights uniform on [-1/sqrt(fan_in), +1/sqrt(fan_in)], biases exactly 0.
FnnParams init_fnn(int input_dim, int hidden, int num_actions, std::uint64_t seed);

AdamState make_adam_state(const FnnParams& params, const AdamConfig& config);

/// Q = rectifier(X w1 + b1) w2 + b2.
Matrix fnn_forward(const FnnParams& params, const Matrix& x_batch);

struct FnnLossResult {
    double loss = 0.0;
    FnnParams grads;
};

/// Squared loss over taken-action entries, (1/2M) |masked targets - masked
/// predictions|_F^2, with gradients by backpropagation.
FnnLossResult fnn_loss_and_grads(const FnnParams& params, const Matrix& x_batch,
                                 const Matrix& masked_targets, std::span<const int> actions);

/// Standard bias-corrected Adam step.
void adam_step(AdamState& adam, FnnParams& params, const FnnParams& grads);

struct FnnAgentOptions {
    ControlKind kind = ControlKind::q_learning;
    int num_actions = 2;
    int hidden = 256;
    double gamma = 0.99;
    double epsilon = 0.01;
    AdamConfig adam;
};

// DQN / deep-Sarsa style learner on flattened transitions.
class FnnAgent : public Agent {
public:
    FnnAgent(int input_dim, const FnnAgentOptions& options, std::uint64_t weight_seed);

    void begin_episode() override {}
    int act(const Vector& observation, Rng& rng) override;
    /// Flattens the sampled series to their non-fill transitions.
    void train_step(std::span<const TransitionSeries> minibatch) override;
    void train_on_transitions(std::span<const Transition> batch);
    void sync_target() override;
    std::string snapshot_json() const override;

    const FnnParams& params() const { return params_; }
    FnnParams& params() { return params_; }
    const FnnParams& target_params() const { return target_; }
    const AdamState& adam() const { return adam_; }
    const FnnAgentOptions& options() const { return options_; }
    int input_dim() const { return input_dim_; }

private:
    friend FnnAgent fnn_agent_from_snapshot(const std::string&);

    int input_dim_;
    FnnAgentOptions options_;
    FnnParams params_;
    FnnParams target_;
    AdamState adam_;
};

}  // namespace esnrls
