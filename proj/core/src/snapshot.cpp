#include "esnrls/snapshot.hpp"

#include <json.hpp>

namespace esnrls {

namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
    json data = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            data.push_back(m(r, c));
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Matrix matrix_from_json(const json& j) {
    const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
    const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
    const auto& data = j.at("data");
    if (static_cast<Eigen::Index>(data.size()) != rows * cols)
        throw std::invalid_argument("snapshot: matrix entry count does not match dims");
    Matrix m(rows, cols);
    std::size_t i = 0;
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = data[i++].get<double>();
    return m;
}

json vector_to_json(const Vector& v) {
    json data = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) data.push_back(v[i]);
    return data;
}

Vector vector_from_json(const json& j) {
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = j[static_cast<std::size_t>(i)].get<double>();
    return v;
}

std::string kind_name(ControlKind k) { return k == ControlKind::q_learning ? "q_learning" : "sarsa"; }

ControlKind kind_from(const std::string& s) {
    if (s == "q_learning") return ControlKind::q_learning;
    if (s == "sarsa") return ControlKind::sarsa;
    throw std::invalid_argument("snapshot: unknown control kind " + s);
}

json reservoir_config_to_json(const ReservoirConfig& c) {
    return json{{"input_dim", c.input_dim},
                {"reservoir_size", c.reservoir_size},
                {"target_radius", c.target_radius},
                {"density", c.density},
                {"input_scale", c.input_scale},
                {"bias_scale", c.bias_scale},
                {"leak_rate", c.leak_rate},
                {"activation", c.activation == Activation::rectifier ? "rectifier" : "identity"},
                {"leaky_form", c.leaky_form == LeakyForm::paper ? "paper" : "standard"}};
}

ReservoirConfig reservoir_config_from_json(const json& j) {
    ReservoirConfig c;
    c.input_dim = j.at("input_dim").get<int>();
    c.reservoir_size = j.at("reservoir_size").get<int>();
    c.target_radius = j.at("target_radius").get<double>();
    c.density = j.at("density").get<double>();
    c.input_scale = j.at("input_scale").get<double>();
    c.bias_scale = j.at("bias_scale").get<double>();
    c.leak_rate = j.at("leak_rate").get<double>();
    c.activation = j.at("activation").get<std::string>() == "identity" ? Activation::identity
                                                                       : Activation::rectifier;
    c.leaky_form = j.at("leaky_form").get<std::string>() == "standard" ? LeakyForm::standard
                                                                       : LeakyForm::paper;
    return c;
}

json fnn_params_to_json(const FnnParams& p) {
    return json{{"w1", matrix_to_json(p.w1)},
                {"b1", vector_to_json(p.b1)},
                {"w2", matrix_to_json(p.w2)},
                {"b2", vector_to_json(p.b2)}};
}

FnnParams fnn_params_from_json(const json& j) {
    FnnParams p;
    p.w1 = matrix_from_json(j.at("w1"));
    p.b1 = vector_from_json(j.at("b1"));
    p.w2 = matrix_from_json(j.at("w2"));
    p.b2 = vector_from_json(j.at("b2"));
    return p;
}

}  // namespace

std::string EsnAgent::snapshot_json() const {
    json j;
    j["format"] = "esnrls-agent-snapshot";
    j["version"] = 1;
    j["agent"] = options_.kind == ControlKind::q_learning ? "esnrls-q" : "esnrls-sarsa";
    j["options"] = json{{"kind", kind_name(options_.kind)},
                        {"num_actions", options_.num_actions},
                        {"gamma", options_.gamma},
                        {"epsilon", options_.epsilon},
                        {"omega", options_.omega},
                        {"lambda", options_.lambda},
                        {"kappa", options_.kappa},
                        {"p0_scale", options_.p0_scale},
                        {"theta_init_scale", options_.theta_init_scale},
                        {"series_len", options_.series_len},
                        {"hidden_reset",
                         options_.hidden_reset == HiddenReset::series_aligned ? "series" : "episode"},
                        {"target_chain",
                         options_.target_chain == TargetChain::continue_policy ? "continue" : "zero"},
                        {"mean_scope", options_.mean_scope == MeanScope::series ? "series" : "batch"}};
    j["reservoir"] = json{{"seed", reservoir_seed_},
                          {"config", reservoir_config_to_json(config_)},
                          {"w_in", matrix_to_json(reservoir_.w_in)},
                          {"w_res", matrix_to_json(reservoir_.w_res)},
                          {"b_res", vector_to_json(reservoir_.b_res)}};
    j["theta_policy"] = matrix_to_json(theta_policy_.theta);
    j["theta_target"] = matrix_to_json(theta_target_.theta);
    j["rls"] = json{{"lambda", rls_.lambda}, {"kappa", rls_.kappa}, {"p", matrix_to_json(rls_.p)}};
    return j.dump(2) + "\n";
}

EsnAgent esn_agent_from_snapshot(const std::string& json_text) {
    const json j = json::parse(json_text);
    if (j.at("format").get<std::string>() != "esnrls-agent-snapshot")
        throw std::invalid_argument("snapshot: unexpected format tag");
    const json& o = j.at("options");
    EsnAgentOptions options;
    options.kind = kind_from(o.at("kind").get<std::string>());
    options.num_actions = o.at("num_actions").get<int>();
    options.gamma = o.at("gamma").get<double>();
    options.epsilon = o.at("epsilon").get<double>();
    options.omega = o.at("omega").get<double>();
    options.lambda = o.at("lambda").get<double>();
    options.kappa = o.at("kappa").get<double>();
    options.p0_scale = o.at("p0_scale").get<double>();
    options.theta_init_scale = o.at("theta_init_scale").get<double>();
    options.series_len = o.at("series_len").get<int>();
    options.hidden_reset = o.at("hidden_reset").get<std::string>() == "episode"
                               ? HiddenReset::episode_start
                               : HiddenReset::series_aligned;
    options.target_chain = o.at("target_chain").get<std::string>() == "zero"
                               ? TargetChain::zero_init
                               : TargetChain::continue_policy;
    options.mean_scope =
        o.at("mean_scope").get<std::string>() == "batch" ? MeanScope::batch : MeanScope::series;

    const json& res = j.at("reservoir");
    const ReservoirConfig config = reservoir_config_from_json(res.at("config"));
    EsnAgent agent(config, options, res.at("seed").get<std::uint64_t>(), 0);
    agent.reservoir_.w_in = matrix_from_json(res.at("w_in"));
    agent.reservoir_.w_res = matrix_from_json(res.at("w_res"));
    agent.reservoir_.b_res = vector_from_json(res.at("b_res"));
    agent.theta_policy_.theta = matrix_from_json(j.at("theta_policy"));
    agent.theta_target_.theta = matrix_from_json(j.at("theta_target"));
    agent.rls_.lambda = j.at("rls").at("lambda").get<double>();
    agent.rls_.kappa = j.at("rls").at("kappa").get<double>();
    agent.rls_.p = matrix_from_json(j.at("rls").at("p"));
    agent.begin_episode();
    return agent;
}

std::string FnnAgent::snapshot_json() const {
    json j;
    j["format"] = "esnrls-agent-snapshot";
    j["version"] = 1;
    j["agent"] = options_.kind == ControlKind::q_learning ? "fnnadam-q" : "fnnadam-sarsa";
    j["input_dim"] = input_dim_;
    j["options"] = json{{"kind", kind_name(options_.kind)},
                        {"num_actions", options_.num_actions},
                        {"hidden", options_.hidden},
                        {"gamma", options_.gamma},
                        {"epsilon", options_.epsilon},
                        {"adam", json{{"alpha", options_.adam.alpha},
                                      {"beta1", options_.adam.beta1},
                                      {"beta2", options_.adam.beta2},
                                      {"epsilon", options_.adam.epsilon}}}};
    j["params"] = fnn_params_to_json(params_);
    j["target"] = fnn_params_to_json(target_);
    j["adam_state"] = json{{"t", adam_.t}, {"m", fnn_params_to_json(adam_.m)}, {"v", fnn_params_to_json(adam_.v)}};
    return j.dump(2) + "\n";
}

FnnAgent fnn_agent_from_snapshot(const std::string& json_text) {
    const json j = json::parse(json_text);
    if (j.at("format").get<std::string>() != "esnrls-agent-snapshot")
        throw std::invalid_argument("snapshot: unexpected format tag");
    const json& o = j.at("options");
    FnnAgentOptions options;
    options.kind = kind_from(o.at("kind").get<std::string>());
    options.num_actions = o.at("num_actions").get<int>();
    options.hidden = o.at("hidden").get<int>();
    options.gamma = o.at("gamma").get<double>();
    options.epsilon = o.at("epsilon").get<double>();
    options.adam.alpha = o.at("adam").at("alpha").get<double>();
    options.adam.beta1 = o.at("adam").at("beta1").get<double>();
    options.adam.beta2 = o.at("adam").at("beta2").get<double>();
    options.adam.epsilon = o.at("adam").at("epsilon").get<double>();

    FnnAgent agent(j.at("input_dim").get<int>(), options, 0);
    agent.params_ = fnn_params_from_json(j.at("params"));
    agent.target_ = fnn_params_from_json(j.at("target"));
    agent.adam_.t = j.at("adam_state").at("t").get<long>();
    agent.adam_.m = fnn_params_from_json(j.at("adam_state").at("m"));
    agent.adam_.v = fnn_params_from_json(j.at("adam_state").at("v"));
    agent.adam_.config = options.adam;
    return agent;
}

}  // namespace esnrls
