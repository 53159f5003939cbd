#include <benchmark/benchmark.h>

#include "esnrls/cartpole.hpp"
#include "esnrls/esn_agent.hpp"
#include "esnrls/numerics.hpp"
#include "esnrls/rng.hpp"

namespace {

using namespace esnrls;

ReservoirConfig paper_config(int input_dim = 4) {
    ReservoirConfig c;
    c.input_dim = input_dim;
    return c;
}

std::vector<TransitionSeries> synthetic_minibatch(int m, int t, int input_dim, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<TransitionSeries> batch;
    for (int i = 0; i < m; ++i) {
        TransitionSeries series;
        Vector s(input_dim);
        for (int d = 0; d < input_dim; ++d) s[d] = rng.uniform(-1.0, 1.0);
        for (int k = 0; k < t; ++k) {
            Transition tr;
            tr.s = s;
            for (int d = 0; d < input_dim; ++d) s[d] = rng.uniform(-1.0, 1.0);
            tr.s_next = s;
            tr.a = rng.uniform_int(2);
            tr.a_next = rng.uniform_int(2);
            tr.r = 1.0;
            series.steps.push_back(tr);
        }
        batch.push_back(std::move(series));
    }
    return batch;
}

void BM_RankOneInverseUpdate(benchmark::State& state) {
    const int dim = static_cast<int>(state.range(0));
    Matrix p = Matrix::Identity(dim, dim) * 0.4;
    Rng rng(7);
    Vector u(dim);
    for (int i = 0; i < dim; ++i) u[i] = rng.uniform(0.0, 1.0);
    for (auto _ : state) {
        auto r = rank_one_inverse_update(p, u, 0.99999);
        benchmark::DoNotOptimize(r.p_next.data());
        p = std::move(r.p_next);
    }
}
BENCHMARK(BM_RankOneInverseUpdate)->Arg(261);

void BM_SpectralScale256(benchmark::State& state) {
    for (auto _ : state) {
        ReservoirWeights w = init_reservoir(paper_config(), 42);
        benchmark::DoNotOptimize(w.w_res.data());
    }
}
BENCHMARK(BM_SpectralScale256);

void BM_BatchReservoirForward(benchmark::State& state) {
    const ReservoirConfig config = paper_config();
    const ReservoirWeights w = init_reservoir(config, 42);
    Rng rng(3);
    std::vector<Matrix> series(5, Matrix(64, 4));
    for (Matrix& s : series)
        for (Eigen::Index i = 0; i < s.size(); ++i) s(i / 4, i % 4) = rng.uniform(-1.0, 1.0);
    for (auto _ : state) {
        auto h = batch_reservoir_forward(w, config, series);
        benchmark::DoNotOptimize(h.back().data());
    }
}
BENCHMARK(BM_BatchReservoirForward);

void BM_EsnTrainStep(benchmark::State& state) {
    EsnAgentOptions opt;
    EsnAgent agent(paper_config(), opt, 11, 12);
    const auto minibatch = synthetic_minibatch(64, 5, 4, 99);
    for (auto _ : state) {
        agent.train_step(minibatch);
        benchmark::DoNotOptimize(agent.theta_policy().theta.data());
    }
}
BENCHMARK(BM_EsnTrainStep);

void BM_CartPoleStep(benchmark::State& state) {
    CartPoleState s{0.01, -0.02, 0.03, 0.01};
    int action = 0;
    for (auto _ : state) {
        auto out = cartpole_step(s, action);
        benchmark::DoNotOptimize(out.state);
        action ^= 1;
        if (!out.terminal) s = out.state;
    }
}
BENCHMARK(BM_CartPoleStep);

}  // namespace

BENCHMARK_MAIN();
