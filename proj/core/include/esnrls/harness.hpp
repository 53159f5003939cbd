#pragma once

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "esnrls/agent.hpp"
#include "esnrls/cartpole.hpp"
#include "esnrls/replay.hpp"

namespace esnrls {

enum class Task { mdp_cartpole, pomdp_cartpole };
enum class AgentType { esnrls_q, esnrls_sarsa, fnnadam_q, fnnadam_sarsa };

std::string to_string(Task task);
std::string to_string(AgentType agent);
Task task_from_string(const std::string& s);
AgentType agent_type_from_string(const std::string& s);

struct ExperimentConfig {
    Task task = Task::mdp_cartpole;
    AgentType agent = AgentType::esnrls_q;
    std::uint64_t seed = 1;
    int repeats = 5;
    int warmup_episodes = 1000;
    int train_episodes = 100;
    int max_steps = 200;

    int series_len = 5;    // T
    int batch_size = 64;   // M
    int capacity = 100000; // counted in series
    double epsilon = 0.01;
    double gamma = 0.99;

    double lambda = 0.99999;
    double kappa = 1e-5;
    double omega = 1.0;
    double p0_scale = 0.4;

    int reservoir_size = 256;  // also the FNN hidden width
    double target_radius = 0.95;
    double density = 0.25;
    double leak_rate = 0.0;
    double input_scale = 1.0;
    double bias_scale = 1.0;
    double theta_init_scale = 0.05;
    std::string leaky_form = "paper";     // paper | standard
    std::string hidden_reset = "series";  // series | episode
    std::string target_chain = "continue";  // continue | zero
    std::string mean_scope = "series";      // series | batch

    double adam_alpha = 1e-3;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;

    int train_every = 1;
    int threads = 0;  // parallel repeats; 0 = one thread per repeat up to hw
    bool save_snapshots = false;

    int obs_dim() const { return task == Task::mdp_cartpole ? 4 : 3; }
};

/// Apply the keys present in a JSON object on top of `base`; unknown keys are
/// an error so config-file typos do not pass silently.
ExperimentConfig apply_json_overrides(const ExperimentConfig& base, const std::string& json_text);
std::string config_to_json(const ExperimentConfig& config);

std::unique_ptr<Agent> make_agent(const ExperimentConfig& config, std::uint64_t run_seed);

struct EpisodeLog {
    int run = 0;
    int episode = 0;  // 1-based within a run
    int steps = 0;
    double ret = 0.0;  // undiscounted shaped return
};

/// Fill the buffer with completely random-policy episodes.
void warmup_collect(CartPoleEnv& env, ReplayBuffer& buffer, const ExperimentConfig& config, Rng& policy_rng);

/// Epsilon-greedy training episodes with one train_step per environment step
/// and a target sync at each episode end.
std::vector<EpisodeLog> run_training(CartPoleEnv& env, Agent& agent, ReplayBuffer& buffer,
                                     const ExperimentConfig& config, int run_index, Rng& policy_rng,
                                     Rng& sampling_rng);

struct ExperimentResult {
    std::vector<EpisodeLog> logs;          // all repeats, in repeat order
    std::vector<std::string> snapshots;    // one JSON text per run when requested
    std::vector<std::string> run_errors;   // empty string = run completed
};

/// All repeats of one configuration. Each repeat draws its substreams from
/// seed + repeat index, so results do not depend on scheduling.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Up to six fractional digits, trailing zeros trimmed, at least one kept.
std::string format_real(double value);

void emit_csv(std::span<const EpisodeLog> logs, const std::filesystem::path& path);

struct EpisodeSummary {
    int episode = 0;
    double mean_steps = 0.0;
    int min_steps = 0;
    int max_steps = 0;
};

std::vector<EpisodeSummary> summarize(std::span<const EpisodeLog> logs);
void emit_summary_csv(std::span<const EpisodeSummary> summary, const std::filesystem::path& path);

/// raw.csv, summary.csv, config.json and optional per-run snapshots.
void write_experiment_outputs(const ExperimentConfig& config, const ExperimentResult& result,
                              const std::filesystem::path& out_dir);

}  // namespace esnrls
