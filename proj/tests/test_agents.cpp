#include "esnrls/esn_agent.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"

namespace esnrls {
namespace {

// Reservoir whose hidden state contributes nothing: readouts depend only on
// the observation and bias rows of theta. Makes targets hand-computable.
ReservoirConfig inert_config(int input_dim = 1) {
    ReservoirConfig c;
    c.input_dim = input_dim;
    c.reservoir_size = 1;
    c.density = 1.0;
    c.input_scale = 0.0;
    c.bias_scale = 0.0;
    return c;
}

EsnAgentOptions default_options(ControlKind kind = ControlKind::q_learning) {
    EsnAgentOptions o;
    o.kind = kind;
    o.kappa = 0.0;
    return o;
}

TransitionSeries single_step_series(double s, int a, double s_next, int a_next, double r, bool terminal) {
    TransitionSeries series;
    Transition tr;
    tr.s = Vector::Constant(1, s);
    tr.a = a;
    tr.s_next = Vector::Constant(1, s_next);
    tr.a_next = a_next;
    tr.r = r;
    tr.terminal = terminal;
    series.steps.push_back(tr);
    return series;
}

TEST(Mellowmax, AllEqualInputsReturnThatValue) {
    RowVector q(2);
    q << 1.7, 1.7;
    EXPECT_NEAR(mellowmax(q, 1.0, 1.7), 1.7, 1e-15);
    EXPECT_NEAR(mellowmax(q, 25.0, 0.0), 1.7, 1e-12);
}

TEST(Mellowmax, HandComputedTwoActionValue) {
    RowVector q(2);
    q << 0.0, 1.0;
    // 1 + ln((e^-1 + 1)/2) = 0.62011...
    const double expected = 1.0 + std::log((std::exp(-1.0) + 1.0) / 2.0);
    EXPECT_NEAR(mellowmax(q, 1.0, 1.0), expected, 1e-12);
    EXPECT_NEAR(expected, 0.62011, 5e-6);
}

TEST(Mellowmax, ShiftInvariantInC) {
    Rng rng(12);
    for (int i = 0; i < 10000; ++i) {
        RowVector q(4);
        for (int j = 0; j < 4; ++j) q[j] = rng.uniform(-5.0, 5.0);
        const double omega = rng.uniform(0.1, 10.0);
        const double a = mellowmax(q, omega, 0.0);
        const double b = mellowmax(q, omega, 1.0);
        const double c = mellowmax(q, omega, q.maxCoeff());
        EXPECT_NEAR(a, b, 1e-12);
        EXPECT_NEAR(a, c, 1e-12);
    }
}

TEST(Mellowmax, BoundedBetweenShiftedMeanAndMax) {
    Rng rng(77);
    for (int i = 0; i < 10000; ++i) {
        RowVector q(3);
        for (int j = 0; j < 3; ++j) q[j] = rng.uniform(-2.0, 2.0);
        const double omega = rng.uniform(0.5, 50.0);
        const double mm = mellowmax(q, omega, q.maxCoeff());
        EXPECT_LE(mm, q.maxCoeff() + 1e-12);
        EXPECT_GE(mm, q.mean() - std::log(3.0) / omega - 1e-12);
    }
}

TEST(Mellowmax, LargeOmegaApproachesMax) {
    Rng rng(99);
    for (int i = 0; i < 10000; ++i) {
        RowVector q(2);
        q[0] = rng.uniform(0.0, 1.0);
        q[1] = rng.uniform(0.0, 1.0);
        const double mm = mellowmax(q, 100.0, q.maxCoeff());
        EXPECT_NEAR(mm, q.maxCoeff(), 0.02);
    }
}

TEST(Act, GreedyPicksArgmaxAndBreaksTiesLow) {
    EsnAgentOptions o = default_options();
    o.epsilon = 0.0;
    o.theta_init_scale = 0.0;
    EsnAgent agent(inert_config(), o, 1, 2);
    // theta rows: [obs row; hidden row; bias row]
    agent.theta_policy().theta.setZero();
    agent.theta_policy().theta(2, 0) = 0.3;
    agent.theta_policy().theta(2, 1) = 0.7;
    Rng rng(1);
    agent.begin_episode();
    EXPECT_EQ(agent.act(Vector::Zero(1), rng), 1);

    agent.theta_policy().theta(2, 1) = 0.3;  // tie -> lowest index
    agent.begin_episode();
    EXPECT_EQ(agent.act(Vector::Zero(1), rng), 0);
}

TEST(Act, FullyRandomPolicyIsUniform) {
    EsnAgentOptions o = default_options();
    o.epsilon = 1.0;
    EsnAgent agent(inert_config(), o, 1, 2);
    Rng rng(5);
    int ones = 0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
        agent.begin_episode();
        ones += agent.act(Vector::Zero(1), rng);
    }
    const double sigma = std::sqrt(draws * 0.25);
    EXPECT_NEAR(ones, draws / 2.0, 3.0 * sigma);
}

TEST(Act, GreedyChoiceInvariantUnderConstantShift) {
    EsnAgentOptions o = default_options();
    o.epsilon = 0.0;
    EsnAgent agent(ReservoirConfig{}, o, 21, 22);
    Rng rng(3);
    Vector obs(4);
    obs << 0.01, -0.02, 0.03, 0.04;
    agent.begin_episode();
    const int before = agent.act(obs, rng);
    agent.theta_policy().theta.row(agent.config().feature_dim() - 1).array() += 5.0;  // bias row
    agent.begin_episode();
    EXPECT_EQ(agent.act(obs, rng), before);
}

TEST(ComputeTargets, TerminalTransitionUsesRawReward) {
    EsnAgent agent(inert_config(), default_options(), 1, 2);
    const std::vector<TransitionSeries> minibatch{single_step_series(0.0, 1, 0.0, 1, -10.0, true)};
    const TargetBatch tb = agent.compute_targets(minibatch);
    ASSERT_EQ(tb.q_pi.size(), 1u);
    EXPECT_DOUBLE_EQ(tb.q_pi[0](0, 1), -10.0);
    EXPECT_DOUBLE_EQ(tb.q_pi[0](0, 0), 0.0);
}

TEST(ComputeTargets, ZeroGammaReturnsRewards) {
    EsnAgentOptions o = default_options();
    o.gamma = 0.0;
    EsnAgent agent(inert_config(), o, 1, 2);
    const std::vector<TransitionSeries> minibatch{single_step_series(0.2, 0, 0.4, 1, 2.5, false)};
    const TargetBatch tb = agent.compute_targets(minibatch);
    EXPECT_DOUBLE_EQ(tb.q_pi[0](0, 0), 2.5);
}

TEST(ComputeTargets, ComposesRewardAndMellowmax) {
    // Inert reservoir, s_next = 0: the target readout equals theta's bias
    // row. Set it to (0, 1): target = 1 + 0.99 * mm((0,1), 1) = 1.61391...
    EsnAgentOptions o = default_options();
    EsnAgent agent(inert_config(), o, 1, 2);
    agent.theta_target().theta.setZero();
    agent.theta_target().theta(2, 1) = 1.0;
    const std::vector<TransitionSeries> minibatch{single_step_series(0.0, 0, 0.0, 1, 1.0, false)};
    const TargetBatch tb = agent.compute_targets(minibatch);
    const double mm = 1.0 + std::log((std::exp(-1.0) + 1.0) / 2.0);
    EXPECT_NEAR(tb.q_pi[0](0, 0), 1.0 + 0.99 * mm, 1e-12);
    EXPECT_NEAR(tb.q_pi[0](0, 0), 1.6139, 1e-4);
}

TEST(ComputeTargets, SarsaUsesStoredNextAction) {
    EsnAgentOptions o = default_options(ControlKind::sarsa);
    EsnAgent agent(inert_config(), o, 1, 2);
    agent.theta_target().theta.setZero();
    agent.theta_target().theta(2, 0) = 0.0;
    agent.theta_target().theta(2, 1) = 1.0;
    // Shift differs (c = q[a_next]) but the value equals the q-mode one.
    const std::vector<TransitionSeries> mb{single_step_series(0.0, 0, 0.0, 0, 1.0, false)};
    const TargetBatch tb = agent.compute_targets(mb);
    const double mm = 1.0 + std::log((std::exp(-1.0) + 1.0) / 2.0);
    EXPECT_NEAR(tb.q_pi[0](0, 0), 1.0 + 0.99 * mm, 1e-12);
}

TEST(ComputeTargets, MasksExactlyOneColumnPerRow) {
    EsnAgent agent(ReservoirConfig{}, default_options(), 31, 32);
    Rng rng(8);
    std::vector<TransitionSeries> minibatch;
    for (int i = 0; i < 6; ++i) {
        TransitionSeries series;
        for (int k = 0; k < 5; ++k) {
            Transition tr;
            tr.s = Vector::Zero(4);
            tr.s_next = Vector::Zero(4);
            for (int d = 0; d < 4; ++d) {
                tr.s[d] = rng.uniform(-1.0, 1.0);
                tr.s_next[d] = rng.uniform(-1.0, 1.0);
            }
            tr.a = rng.uniform_int(2);
            tr.a_next = rng.uniform_int(2);
            tr.r = 1.0;
            tr.terminal = k == 4;
            series.steps.push_back(tr);
        }
        minibatch.push_back(series);
    }
    const TargetBatch tb = agent.compute_targets(minibatch);
    for (std::size_t k = 0; k < tb.q_pi.size(); ++k)
        for (Eigen::Index i = 0; i < tb.q_pi[k].rows(); ++i)
            for (Eigen::Index a = 0; a < 2; ++a)
                if (a != tb.actions[k][static_cast<std::size_t>(i)])
                    EXPECT_EQ(tb.q_pi[k](i, a), 0.0);
}

TEST(TrainStep, ZeroInnovationLeavesThetaUntouched) {
    // theta = 0, gamma = 0, rewards 0: targets and masked predictions are
    // both zero, kappa = 0 -> theta stays exactly zero while P advances.
    EsnAgentOptions o = default_options();
    o.gamma = 0.0;
    o.theta_init_scale = 0.0;
    EsnAgent agent(inert_config(), o, 1, 2);
    const Matrix p_before = agent.rls().p;
    const std::vector<TransitionSeries> mb{single_step_series(0.5, 0, 0.6, 1, 0.0, false)};
    agent.train_step(mb);
    EXPECT_TRUE(agent.theta_policy().theta.isZero(0.0));
    EXPECT_FALSE(agent.rls().p.isApprox(p_before, 1e-15));
}

TEST(TrainStep, MatchesNormalEquationOracleAtSingleSample) {
    // M = T = 1, kappa = 0: the mean-approximation step is exact; the agent's
    // theta trajectory must track the dense normal-equation solve.
    EsnAgentOptions o = default_options();
    o.gamma = 0.0;  // target = shaped reward, independent of theta_target
    o.series_len = 1;
    EsnAgent agent(inert_config(1), o, 3, 4);
    test::NormalEquationOracle oracle(agent.theta_policy().theta, o.p0_scale, o.lambda);

    Rng rng(41);
    for (int step = 0; step < 50; ++step) {
        const double s = rng.uniform(-1.0, 1.0);
        const int action = rng.uniform_int(2);
        const double reward = rng.uniform(-2.0, 2.0);
        const std::vector<TransitionSeries> mb{single_step_series(s, action, 0.0, 0, reward, true)};
        agent.train_step(mb);

        // Regressor for the inert reservoir: [s, relu(0) = 0, 1]
        Vector u(3);
        u << s, 0.0, 1.0;
        oracle.step(u, action, reward);
        const Matrix expected = oracle.theta();
        EXPECT_LT((agent.theta_policy().theta - expected).norm() / expected.norm(), 1e-8) << "step " << step;
    }
}

TEST(TrainStep, KeepsPSymmetric) {
    EsnAgent agent(ReservoirConfig{}, default_options(), 11, 12);
    Rng rng(6);
    std::vector<TransitionSeries> minibatch;
    for (int i = 0; i < 8; ++i) {
        TransitionSeries series;
        for (int k = 0; k < 5; ++k) {
            Transition tr;
            tr.s = Vector::Zero(4);
            tr.s_next = Vector::Zero(4);
            for (int d = 0; d < 4; ++d) {
                tr.s[d] = rng.uniform(-0.2, 0.2);
                tr.s_next[d] = rng.uniform(-0.2, 0.2);
            }
            tr.a = rng.uniform_int(2);
            tr.a_next = rng.uniform_int(2);
            tr.r = 1.0;
            series.steps.push_back(tr);
        }
        minibatch.push_back(series);
    }
    for (int i = 0; i < 5; ++i) {
        agent.train_step(minibatch);
        const Matrix& p = agent.rls().p;
        EXPECT_LT((p - p.transpose()).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(SyncTarget, CopiesPolicyReadout) {
    EsnAgent agent(ReservoirConfig{}, default_options(), 7, 8);
    // Before any sync, the target equals the initialization copy.
    EXPECT_TRUE(agent.theta_target().theta == agent.theta_policy().theta);
    agent.theta_policy().theta.array() += 0.5;
    EXPECT_FALSE(agent.theta_target().theta == agent.theta_policy().theta);
    agent.sync_target();
    EXPECT_TRUE(agent.theta_target().theta == agent.theta_policy().theta);
    const Matrix snapshot = agent.theta_target().theta;
    agent.sync_target();  // idempotent
    EXPECT_TRUE(agent.theta_target().theta == snapshot);
}

TEST(OnlineOfflineConsistency, ActingHiddenMatchesBatchReplayPerSegment) {
    // Feed a fixed observation stream through act(); the hidden state after
    // each step must equal the batch forward of that segment run from zero.
    EsnAgentOptions o = default_options();
    o.epsilon = 0.0;
    o.series_len = 5;
    ReservoirConfig config;  // paper defaults
    EsnAgent agent(config, o, 101, 102);
    Rng obs_rng(55);
    Rng act_rng(56);

    const int episode_len = 17;
    std::vector<Vector> observations;
    std::vector<RowVector> online_hidden;
    agent.begin_episode();
    for (int i = 0; i < episode_len; ++i) {
        Vector obs(4);
        for (int d = 0; d < 4; ++d) obs[d] = obs_rng.uniform(-1.0, 1.0);
        observations.push_back(obs);
        agent.act(obs, act_rng);
        online_hidden.push_back(agent.online_hidden());
    }

    for (int start = 0; start < episode_len; start += o.series_len) {
        const int len = std::min(o.series_len, episode_len - start);
        std::vector<Matrix> series;
        for (int k = 0; k < len; ++k) series.push_back(observations[static_cast<std::size_t>(start + k)].transpose());
        const auto hidden = batch_reservoir_forward(agent.reservoir(), config, series);
        for (int k = 0; k < len; ++k) {
            const double diff =
                (hidden[static_cast<std::size_t>(k)].row(0) - online_hidden[static_cast<std::size_t>(start + k)])
                    .cwiseAbs()
                    .maxCoeff();
            EXPECT_LT(diff, 1e-12) << "segment " << start / o.series_len << " step " << k;
        }
    }
}

}  // namespace
}  // namespace esnrls
