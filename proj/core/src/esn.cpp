#include "esnrls/esn.hpp"

#include <numeric>
#include <string>

#include "esnrls/numerics.hpp"
#include "esnrls/rng.hpp"

namespace esnrls {

namespace {

void apply_activation(Matrix& m, Activation activation) {
    if (activation == Activation::rectifier) m = m.cwiseMax(0.0);
}

Matrix random_sparse_recurrent(int n, double density, Rng& rng) {
    const std::int64_t total = static_cast<std::int64_t>(n) * n;
    const std::int64_t nnz = static_cast<std::int64_t>(density * static_cast<double>(total));
    Matrix w = Matrix::Zero(n, n);
    // Partial Fisher-Yates over the flat index space: exactly nnz positions,
    // uniform without replacement.
    std::vector<std::int64_t> idx(static_cast<std::size_t>(total));
    std::iota(idx.begin(), idx.end(), 0);
    for (std::int64_t i = 0; i < nnz; ++i) {
        const std::int64_t j = i + rng.uniform_int(static_cast<int>(total - i));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
        const std::int64_t flat = idx[static_cast<std::size_t>(i)];
        w(flat / n, flat % n) = rng.uniform(-1.0, 1.0);
    }
    return w;
}

}  // namespace

ReservoirWeights init_reservoir(const ReservoirConfig& config, std::uint64_t seed) {
    if (config.reservoir_size < 1) throw std::invalid_argument("init_reservoir: reservoir_size must be >= 1");
    if (!(config.density > 0.0 && config.density <= 1.0))
        throw std::invalid_argument("init_reservoir: density must be in (0,1]");
    if (!(config.leak_rate >= 0.0 && config.leak_rate <= 1.0))
        throw std::invalid_argument("init_reservoir: leak_rate must be in [0,1]");

    ReservoirWeights w;
    Rng in_rng = substream(seed, "w_in");
    w.w_in.resize(config.input_dim, config.reservoir_size);
    for (int r = 0; r < config.input_dim; ++r)
        for (int c = 0; c < config.reservoir_size; ++c)
            w.w_in(r, c) = in_rng.uniform(-config.input_scale, config.input_scale);

    Rng bias_rng = substream(seed, "b_res");
    w.b_res.resize(config.reservoir_size);
    for (int i = 0; i < config.reservoir_size; ++i)
        w.b_res[i] = bias_rng.uniform(-config.bias_scale, config.bias_scale);

    for (int attempt = 0; attempt < 10; ++attempt) {
        Rng res_rng = substream(seed, "w_res", static_cast<std::uint64_t>(attempt));
        Matrix candidate = random_sparse_recurrent(config.reservoir_size, config.density, res_rng);
        if (candidate.isZero(0.0)) continue;
        try {
            w.w_res = spectral_scale(candidate, config.target_radius);
            return w;
        } catch (const std::invalid_argument&) {
            // zero spectral radius (e.g. a nilpotent draw); try the next substream
        }
    }
    throw std::runtime_error("init_reservoir: no usable recurrent matrix in 10 attempts");
}

RowVector reservoir_step(const ReservoirWeights& w, const ReservoirConfig& config,
                         const RowVector& h_prev, const RowVector& x) {
    if (x.size() != w.w_in.rows() || h_prev.size() != w.w_res.rows())
        throw std::invalid_argument("reservoir_step: dimension mismatch");
    const double eta = config.leak_rate;
    Matrix pre = x * w.w_in;
    if (config.leaky_form == LeakyForm::paper) {
        if (eta != 0.0) pre.noalias() += eta * (h_prev * w.w_res);
        pre += w.b_res.transpose();
        apply_activation(pre, config.activation);
        RowVector h = (1.0 - eta) * h_prev + pre;
        if (!h.allFinite()) throw DivergenceError("reservoir_step: non-finite hidden state");
        return h;
    }
    pre.noalias() += h_prev * w.w_res;
    pre += w.b_res.transpose();
    apply_activation(pre, config.activation);
    RowVector h = (1.0 - eta) * h_prev + eta * pre;
    if (!h.allFinite()) throw DivergenceError("reservoir_step: non-finite hidden state");
    return h;
}

Matrix advance_hidden(const ReservoirWeights& w, const ReservoirConfig& config, const Matrix& h_prev,
                      const Matrix& x_batch) {
    if (x_batch.rows() != h_prev.rows() || x_batch.cols() != w.w_in.rows() ||
        h_prev.cols() != w.w_res.rows())
        throw std::invalid_argument("advance_hidden: inconsistent batch shapes");
    const double eta = config.leak_rate;
    Matrix pre = x_batch * w.w_in;
    Matrix h;
    if (config.leaky_form == LeakyForm::paper) {
        if (eta != 0.0) pre.noalias() += eta * (h_prev * w.w_res);
        pre.rowwise() += w.b_res.transpose();
        apply_activation(pre, config.activation);
        h = (1.0 - eta) * h_prev + pre;
    } else {
        pre.noalias() += h_prev * w.w_res;
        pre.rowwise() += w.b_res.transpose();
        apply_activation(pre, config.activation);
        h = (1.0 - eta) * h_prev + eta * pre;
    }
    if (!h.allFinite()) throw DivergenceError("advance_hidden: non-finite hidden state");
    return h;
}

std::vector<Matrix> batch_reservoir_forward(const ReservoirWeights& w, const ReservoirConfig& config,
                                            std::span<const Matrix> series) {
    if (series.empty()) throw std::invalid_argument("batch_reservoir_forward: empty series");
    const auto rows = series.front().rows();
    std::vector<Matrix> hidden;
    hidden.reserve(series.size());
    Matrix h = Matrix::Zero(rows, config.reservoir_size);
    for (std::size_t k = 0; k < series.size(); ++k) {
        if (series[k].rows() != rows)
            throw std::invalid_argument("batch_reservoir_forward: inconsistent batch shapes");
        try {
            h = advance_hidden(w, config, h, series[k]);
        } catch (const DivergenceError&) {
            throw DivergenceError("batch_reservoir_forward: non-finite hidden state at series step " +
                                  std::to_string(k));
        }
        hidden.push_back(h);
    }
    return hidden;
}

Matrix build_regressor(const Matrix& state_batch, const Matrix& hidden) {
    if (state_batch.rows() != hidden.rows())
        throw std::invalid_argument("build_regressor: row count mismatch");
    const auto m = state_batch.rows();
    Matrix u(m, state_batch.cols() + hidden.cols() + 1);
    u.leftCols(state_batch.cols()) = state_batch;
    u.middleCols(state_batch.cols(), hidden.cols()) = hidden;
    u.rightCols(1).setOnes();
    return u;
}

Matrix readout(const OutputParams& theta, const Matrix& u) {
    if (u.cols() != theta.theta.rows())
        throw std::invalid_argument("readout: regressor width does not match theta");
    return u * theta.theta;
}

}  // namespace esnrls
