#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "esnrls/types.hpp"

namespace esnrls {

enum class Activation { rectifier, identity };

// Which leaky-integrator recurrence to use. `paper` keeps the leak rate on
// the recurrent term inside the activation and does not scale the fresh
// activation; `standard` is the conventional blend, kept for sensitivity
// studies only.
enum class LeakyForm { paper, standard };

struct ReservoirConfig {
    int input_dim = 4;
    int reservoir_size = 256;
    double target_radius = 0.95;
    double density = 0.25;  // fraction of nonzero recurrent entries
    double input_scale = 1.0;
    double bias_scale = 1.0;
    double leak_rate = 0.0;
    Activation activation = Activation::rectifier;
    LeakyForm leaky_form = LeakyForm::paper;

    int feature_dim() const { return input_dim + reservoir_size + 1; }
};

// Fixed random reservoir parameters; never trained after construction.
struct ReservoirWeights {
    Matrix w_in;   // input_dim x reservoir_size
    Matrix w_res;  // reservoir_size x reservoir_size
    Vector b_res;  // reservoir_size
};

/// Trainable readout, [(W^o)^T, b^o]^T stacked: (input_dim + N + 1) x num_actions.
struct OutputParams {
    Matrix theta;
};

/// Draw reservoir weights: w_in and b_res uniform within their scales, w_res
/// with exactly floor(density * N^2) nonzero entries rescaled to the target
/// spectral radius. Deterministic given (config, seed).
ReservoirWeights init_reservoir(const ReservoirConfig& config, std::uint64_t seed);

/// One reservoir step for a single sample (row-vector convention).
RowVector reservoir_step(const ReservoirWeights& w, const ReservoirConfig& config,
                         const RowVector& h_prev, const RowVector& x);

/// One reservoir step for a whole batch from an explicit hidden state.
Matrix advance_hidden(const ReservoirWeights& w, const ReservoirConfig& config, const Matrix& h_prev,
                      const Matrix& x_batch);

/// Reservoir chain over a series of state batches, started from the all-zero
/// hidden state. series[k] is M x input_dim; returns T hidden batches M x N.
std::vector<Matrix> batch_reservoir_forward(const ReservoirWeights& w, const ReservoirConfig& config,
                                            std::span<const Matrix> series);

/// Regressor [S, H, 1]: M x (input_dim + N + 1).
Matrix build_regressor(const Matrix& state_batch, const Matrix& hidden);

/// Q = U * theta: one row per sample, one column per action.
Matrix readout(const OutputParams& theta, const Matrix& u);

}  // namespace esnrls
