#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "esnrls/agent.hpp"
#include "esnrls/esn.hpp"
#include "esnrls/rls.hpp"

namespace esnrls {

/// Mellowmax over one action-value row, evaluated around the shift c:
///   (1/omega) log((1/|A|) sum_i exp(omega (q_i - c))) + c
/// Analytically independent of c; the shift only anchors the exponentials.
double mellowmax(const RowVector& q_row, double omega, double c);

// When the acting-time hidden state restarts from zero. `series_aligned`
// restarts every series_len steps so that acting sees exactly the regressors
// the replayed series produce; `episode_start` lets it run across the whole
// episode.
enum class HiddenReset { series_aligned, episode_start };

// Hidden chain driving the target readout over next-state series.
// `continue_policy` advances the policy-side chain one step with each
// next-state input, so Q(s') is read from the same features the policy pairs
// with that state one position later; `zero_init` runs an independent chain
// from the all-zero state.
enum class TargetChain { continue_policy, zero_init };

// Granularity of the mean-approximation. `series` averages within each
// sampled series (the scale at which consecutive states are actually
// similar) and applies one rank-one update per series, with forgetting and
// shrinkage applied once per train step:
//   A_t = lambda A_{t-1} + (1/M) sum_s u_s u_s^T.
// `batch` collapses the whole minibatch into a single mean vector and a
// single rank-one update.
enum class MeanScope { series, batch };

struct EsnAgentOptions {
    ControlKind kind = ControlKind::q_learning;
    int num_actions = 2;
    double gamma = 0.99;
    double epsilon = 0.01;
    double omega = 1.0;
    double lambda = 0.99999;
    double kappa = 1e-5;
    double p0_scale = 0.4;
    double theta_init_scale = 0.05;
    int series_len = 5;
    HiddenReset hidden_reset = HiddenReset::series_aligned;
    TargetChain target_chain = TargetChain::continue_policy;
    MeanScope mean_scope = MeanScope::series;
};

/// Masked per-step target matrices for one minibatch, plus the taken actions
/// defining the mask.
struct TargetBatch {
    std::vector<Matrix> q_pi;
    std::vector<std::vector<int>> actions;
};

// Policy-control agent with a fixed random reservoir shared between the
// policy and target readouts, trained by mean-approximation RLS.
class EsnAgent : public Agent {
public:
    EsnAgent(const ReservoirConfig& config, const EsnAgentOptions& options,
             std::uint64_t reservoir_seed, std::uint64_t theta_seed);

    void begin_episode() override;
    int act(const Vector& observation, Rng& rng) override;
    TargetBatch compute_targets(std::span<const TransitionSeries> minibatch) const;
    void train_step(std::span<const TransitionSeries> minibatch) override;
    void sync_target() override;
    std::string snapshot_json() const override;

    const ReservoirConfig& config() const { return config_; }
    const EsnAgentOptions& options() const { return options_; }
    const ReservoirWeights& reservoir() const { return reservoir_; }
    std::uint64_t reservoir_seed() const { return reservoir_seed_; }
    const OutputParams& theta_policy() const { return theta_policy_; }
    const OutputParams& theta_target() const { return theta_target_; }
    OutputParams& theta_policy() { return theta_policy_; }
    OutputParams& theta_target() { return theta_target_; }
    const RlsState& rls() const { return rls_; }
    const RowVector& online_hidden() const { return online_h_; }

private:
    friend EsnAgent esn_agent_from_snapshot(const std::string&);

    ReservoirConfig config_;
    EsnAgentOptions options_;
    std::uint64_t reservoir_seed_;
    ReservoirWeights reservoir_;
    OutputParams theta_policy_;
    OutputParams theta_target_;
    RlsState rls_;
    RowVector online_h_;
    int steps_since_episode_start_ = 0;
};

}  // namespace esnrls
