#include "esnrls/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <thread>

#include <json.hpp>

#include "esnrls/esn_agent.hpp"
#include "esnrls/fnn_agent.hpp"

namespace esnrls {

using nlohmann::json;

std::string to_string(Task task) { return task == Task::mdp_cartpole ? "mdp" : "pomdp"; }

std::string to_string(AgentType agent) {
    switch (agent) {
        case AgentType::esnrls_q: return "esnrls-q";
        case AgentType::esnrls_sarsa: return "esnrls-sarsa";
        case AgentType::fnnadam_q: return "fnnadam-q";
        case AgentType::fnnadam_sarsa: return "fnnadam-sarsa";
    }
    throw std::logic_error("to_string: bad AgentType");
}

Task task_from_string(const std::string& s) {
    if (s == "mdp") return Task::mdp_cartpole;
    if (s == "pomdp") return Task::pomdp_cartpole;
    throw std::invalid_argument("unknown task '" + s + "' (expected mdp or pomdp)");
}

AgentType agent_type_from_string(const std::string& s) {
    if (s == "esnrls-q") return AgentType::esnrls_q;
    if (s == "esnrls-sarsa") return AgentType::esnrls_sarsa;
    if (s == "fnnadam-q") return AgentType::fnnadam_q;
    if (s == "fnnadam-sarsa") return AgentType::fnnadam_sarsa;
    throw std::invalid_argument("unknown agent '" + s + "'");
}

namespace {

// Single source of field names for both JSON directions.
template <typename ConfigT, typename Fn>
void for_each_field(ConfigT& c, Fn&& fn) {
    fn("task", c.task);
    fn("agent", c.agent);
    fn("seed", c.seed);
    fn("repeats", c.repeats);
    fn("warmup_episodes", c.warmup_episodes);
    fn("train_episodes", c.train_episodes);
    fn("max_steps", c.max_steps);
    fn("series_len", c.series_len);
    fn("batch_size", c.batch_size);
    fn("capacity", c.capacity);
    fn("epsilon", c.epsilon);
    fn("gamma", c.gamma);
    fn("lambda", c.lambda);
    fn("kappa", c.kappa);
    fn("omega", c.omega);
    fn("p0_scale", c.p0_scale);
    fn("reservoir_size", c.reservoir_size);
    fn("target_radius", c.target_radius);
    fn("density", c.density);
    fn("leak_rate", c.leak_rate);
    fn("input_scale", c.input_scale);
    fn("bias_scale", c.bias_scale);
    fn("theta_init_scale", c.theta_init_scale);
    fn("leaky_form", c.leaky_form);
    fn("hidden_reset", c.hidden_reset);
    fn("target_chain", c.target_chain);
    fn("mean_scope", c.mean_scope);
    fn("adam_alpha", c.adam_alpha);
    fn("adam_beta1", c.adam_beta1);
    fn("adam_beta2", c.adam_beta2);
    fn("adam_epsilon", c.adam_epsilon);
    fn("train_every", c.train_every);
    fn("threads", c.threads);
    fn("save_snapshots", c.save_snapshots);
}

void set_field(Task& field, const json& v) { field = task_from_string(v.get<std::string>()); }
void set_field(AgentType& field, const json& v) { field = agent_type_from_string(v.get<std::string>()); }
template <typename T>
void set_field(T& field, const json& v) { field = v.get<T>(); }

json get_field(const Task& field) { return to_string(field); }
json get_field(const AgentType& field) { return to_string(field); }
template <typename T>
json get_field(const T& field) { return field; }

void validate(const ExperimentConfig& c) {
    if (c.repeats < 1 || c.max_steps < 1 || c.series_len < 1 || c.batch_size < 1 || c.capacity < 1 ||
        c.train_every < 1 || c.reservoir_size < 1)
        throw std::invalid_argument("config: counts must be >= 1");
    if (c.warmup_episodes < 0 || c.train_episodes < 0)
        throw std::invalid_argument("config: episode counts must be >= 0");
    if (c.epsilon < 0.0 || c.epsilon > 1.0 || c.gamma < 0.0 || c.gamma > 1.0)
        throw std::invalid_argument("config: probabilities must be in [0,1]");
    if (c.leaky_form != "paper" && c.leaky_form != "standard")
        throw std::invalid_argument("config: leaky_form must be 'paper' or 'standard'");
    if (c.hidden_reset != "series" && c.hidden_reset != "episode")
        throw std::invalid_argument("config: hidden_reset must be 'series' or 'episode'");
    if (c.target_chain != "continue" && c.target_chain != "zero")
        throw std::invalid_argument("config: target_chain must be 'continue' or 'zero'");
    if (c.mean_scope != "series" && c.mean_scope != "batch")
        throw std::invalid_argument("config: mean_scope must be 'series' or 'batch'");
}

}  // namespace

ExperimentConfig apply_json_overrides(const ExperimentConfig& base, const std::string& json_text) {
    const json overrides = json::parse(json_text);
    if (!overrides.is_object()) throw std::invalid_argument("config overrides must be a JSON object");
    ExperimentConfig config = base;
    json leftover = overrides;
    for_each_field(config, [&](const char* name, auto& field) {
        if (auto it = leftover.find(name); it != leftover.end()) {
            set_field(field, *it);
            leftover.erase(it);
        }
    });
    if (!leftover.empty())
        throw std::invalid_argument("config: unknown key '" + leftover.begin().key() + "'");
    validate(config);
    return config;
}

std::string config_to_json(const ExperimentConfig& config) {
    json j;
    for_each_field(config, [&](const char* name, const auto& field) { j[name] = get_field(field); });
    return j.dump(2) + "\n";
}

std::unique_ptr<Agent> make_agent(const ExperimentConfig& config, std::uint64_t run_seed) {
    const bool sarsa = config.agent == AgentType::esnrls_sarsa || config.agent == AgentType::fnnadam_sarsa;
    const ControlKind kind = sarsa ? ControlKind::sarsa : ControlKind::q_learning;
    if (config.agent == AgentType::esnrls_q || config.agent == AgentType::esnrls_sarsa) {
        ReservoirConfig rc;
        rc.input_dim = config.obs_dim();
        rc.reservoir_size = config.reservoir_size;
        rc.target_radius = config.target_radius;
        rc.density = config.density;
        rc.input_scale = config.input_scale;
        rc.bias_scale = config.bias_scale;
        rc.leak_rate = config.leak_rate;
        rc.activation = Activation::rectifier;
        rc.leaky_form = config.leaky_form == "standard" ? LeakyForm::standard : LeakyForm::paper;
        EsnAgentOptions opt;
        opt.kind = kind;
        opt.num_actions = CartPoleEnv::num_actions;
        opt.gamma = config.gamma;
        opt.epsilon = config.epsilon;
        opt.omega = config.omega;
        opt.lambda = config.lambda;
        opt.kappa = config.kappa;
        opt.p0_scale = config.p0_scale;
        opt.theta_init_scale = config.theta_init_scale;
        opt.series_len = config.series_len;
        opt.hidden_reset =
            config.hidden_reset == "episode" ? HiddenReset::episode_start : HiddenReset::series_aligned;
        opt.target_chain =
            config.target_chain == "zero" ? TargetChain::zero_init : TargetChain::continue_policy;
        opt.mean_scope = config.mean_scope == "batch" ? MeanScope::batch : MeanScope::series;
        return std::make_unique<EsnAgent>(rc, opt, derive_seed(run_seed, "reservoir-init"),
                                          derive_seed(run_seed, "weight-init"));
    }
    FnnAgentOptions opt;
    opt.kind = kind;
    opt.num_actions = CartPoleEnv::num_actions;
    opt.hidden = config.reservoir_size;
    opt.gamma = config.gamma;
    opt.epsilon = config.epsilon;
    opt.adam = AdamConfig{config.adam_alpha, config.adam_beta1, config.adam_beta2, config.adam_epsilon};
    return std::make_unique<FnnAgent>(config.obs_dim(), opt, derive_seed(run_seed, "weight-init"));
}

namespace {

struct EpisodeRollout {
    std::vector<Transition> transitions;
    int steps = 0;
    double shaped_return = 0.0;
};

// Shared episode loop: chooses an action for every visited state, backfills
// a_next on the previous transition, shapes the final reward, and invokes
// the hook after every environment step.
template <typename ChooseAction, typename AfterStep>
EpisodeRollout roll_episode(CartPoleEnv& env, int max_steps, ChooseAction&& choose, AfterStep&& after_step) {
    EpisodeRollout out;
    Vector obs = env.reset();
    int action = choose(obs);
    for (int step = 1;; ++step) {
        const CartPoleStepResult result = env.step_raw(action);
        const Vector next_obs = observe(result.state, env.mode());
        Transition tr;
        tr.s = obs;
        tr.a = action;
        tr.s_next = next_obs;
        tr.r = result.reward;
        tr.terminal = result.terminal;
        const bool done = result.terminal || step == max_steps;
        if (done) {
            tr.r = shape_terminal_reward(step, max_steps, tr.r);
            tr.a_next = action;  // no successor action exists
        } else {
            const int next_action = choose(next_obs);
            tr.a_next = next_action;
            action = next_action;
            obs = next_obs;
        }
        out.shaped_return += tr.r;
        out.transitions.push_back(std::move(tr));
        out.steps = step;
        after_step();
        if (done) return out;
    }
}

}  // namespace

void warmup_collect(CartPoleEnv& env, ReplayBuffer& buffer, const ExperimentConfig& config, Rng& policy_rng) {
    for (int episode = 0; episode < config.warmup_episodes; ++episode) {
        EpisodeRollout rollout = roll_episode(
            env, config.max_steps, [&](const Vector&) { return policy_rng.uniform_int(CartPoleEnv::num_actions); },
            [] {});
        for (TransitionSeries& series : segment_episode(rollout.transitions, config.series_len))
            buffer.push(std::move(series));
    }
}

std::vector<EpisodeLog> run_training(CartPoleEnv& env, Agent& agent, ReplayBuffer& buffer,
                                     const ExperimentConfig& config, int run_index, Rng& policy_rng,
                                     Rng& sampling_rng) {
    std::vector<EpisodeLog> logs;
    logs.reserve(static_cast<std::size_t>(config.train_episodes));
    int env_steps = 0;
    for (int episode = 1; episode <= config.train_episodes; ++episode) {
        agent.begin_episode();
        EpisodeRollout rollout =
            roll_episode(env, config.max_steps, [&](const Vector& obs) { return agent.act(obs, policy_rng); },
                         [&] {
                             ++env_steps;
                             if (env_steps % config.train_every != 0) return;
                             if (buffer.size() < static_cast<std::size_t>(config.batch_size)) return;
                             const auto minibatch =
                                 buffer.sample_minibatch(static_cast<std::size_t>(config.batch_size), sampling_rng);
                             agent.train_step(minibatch);
                         });
        for (TransitionSeries& series : segment_episode(rollout.transitions, config.series_len))
            buffer.push(std::move(series));
        agent.sync_target();
        logs.push_back(EpisodeLog{run_index, episode, rollout.steps, rollout.shaped_return});
    }
    return logs;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    validate(config);
    const int repeats = config.repeats;
    std::vector<std::vector<EpisodeLog>> per_run(static_cast<std::size_t>(repeats));
    std::vector<std::string> snapshots(static_cast<std::size_t>(repeats));
    std::vector<std::string> errors(static_cast<std::size_t>(repeats));

    auto run_one = [&](int r) {
        const std::uint64_t run_seed = config.seed + static_cast<std::uint64_t>(r);
        try {
            const ObservationMode mode =
                config.task == Task::mdp_cartpole ? ObservationMode::full4 : ObservationMode::partial3;
            CartPoleEnv env(mode, derive_seed(run_seed, "env"));
            ReplayBuffer buffer(static_cast<std::size_t>(config.capacity));
            std::unique_ptr<Agent> agent = make_agent(config, run_seed);
            Rng policy_rng = substream(run_seed, "policy");
            Rng sampling_rng = substream(run_seed, "sampling");
            warmup_collect(env, buffer, config, policy_rng);
            per_run[static_cast<std::size_t>(r)] =
                run_training(env, *agent, buffer, config, r, policy_rng, sampling_rng);
            if (config.save_snapshots) snapshots[static_cast<std::size_t>(r)] = agent->snapshot_json();
        } catch (const std::exception& e) {
            errors[static_cast<std::size_t>(r)] = e.what();
        }
    };

    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const int workers = config.threads > 0 ? config.threads : static_cast<int>(hw);
    if (workers <= 1 || repeats <= 1) {
        for (int r = 0; r < repeats; ++r) run_one(r);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        const int n_threads = std::min(workers, repeats);
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int w = 0; w < n_threads; ++w)
            pool.emplace_back([&] {
                for (int r = next.fetch_add(1); r < repeats; r = next.fetch_add(1)) run_one(r);
            });
        for (std::thread& t : pool) t.join();
    }

    ExperimentResult result;
    for (int r = 0; r < repeats; ++r)
        result.logs.insert(result.logs.end(), per_run[static_cast<std::size_t>(r)].begin(),
                           per_run[static_cast<std::size_t>(r)].end());
    result.snapshots = std::move(snapshots);
    result.run_errors = std::move(errors);
    return result;
}

std::string format_real(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", value);
    std::string s(buf);
    const auto dot = s.find('.');
    const auto last = s.find_last_not_of('0');
    s.erase(std::max(last + 1, dot + 2));
    return s;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    return out;
}

}  // namespace

void emit_csv(std::span<const EpisodeLog> logs, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << "run,episode,steps,return\n";
    for (const EpisodeLog& log : logs)
        out << log.run << ',' << log.episode << ',' << log.steps << ',' << format_real(log.ret) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<EpisodeSummary> summarize(std::span<const EpisodeLog> logs) {
    if (logs.empty()) throw std::invalid_argument("summarize: no logs");
    std::map<int, std::vector<int>> by_episode;
    for (const EpisodeLog& log : logs) by_episode[log.episode].push_back(log.steps);
    std::vector<EpisodeSummary> out;
    out.reserve(by_episode.size());
    for (const auto& [episode, steps] : by_episode) {
        EpisodeSummary s;
        s.episode = episode;
        s.min_steps = *std::min_element(steps.begin(), steps.end());
        s.max_steps = *std::max_element(steps.begin(), steps.end());
        double total = 0.0;
        for (int v : steps) total += v;
        s.mean_steps = total / static_cast<double>(steps.size());
        out.push_back(s);
    }
    return out;
}

void emit_summary_csv(std::span<const EpisodeSummary> summary, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << "episode,mean_steps,min_steps,max_steps\n";
    for (const EpisodeSummary& s : summary)
        out << s.episode << ',' << format_real(s.mean_steps) << ',' << s.min_steps << ',' << s.max_steps << '\n';
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_experiment_outputs(const ExperimentConfig& config, const ExperimentResult& result,
                              const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    emit_csv(result.logs, out_dir / "raw.csv");
    if (!result.logs.empty()) {
        const auto summary = summarize(result.logs);
        emit_summary_csv(summary, out_dir / "summary.csv");
    }
    open_out(out_dir / "config.json") << config_to_json(config);
    if (config.save_snapshots)
        for (std::size_t r = 0; r < result.snapshots.size(); ++r)
            if (!result.snapshots[r].empty())
                open_out(out_dir / ("snapshot_run" + std::to_string(r) + ".json")) << result.snapshots[r];
}

}  // namespace esnrls
