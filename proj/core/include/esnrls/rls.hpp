#pragma once

#include <span>
#include <vector>

#include "esnrls/esn.hpp"
#include "esnrls/types.hpp"

namespace esnrls {

// Inverse autocorrelation matrix with its forgetting and regularization
// factors. One instance per trained readout; updates are order-dependent.
struct RlsState {
    Matrix p;
    double lambda = 0.99999;
    double kappa = 1e-5;
};

RlsState make_rls_state(int dim, double p0_scale, double lambda, double kappa);

/// Masked target/prediction pair for one batch step: exactly one column per
/// row (the taken action) may be nonzero, the rest is zero by convention.
struct MaskedTargets {
    Matrix q_pi;
    Matrix q_pred;
};

/// Zero out every entry except the taken-action column of each row.
Matrix mask_to_actions(const Matrix& q_full, std::span<const int> actions);

/// Mean regressor over a series of U batches: (1/(MT)) sum of all rows.
Vector mean_features(std::span<const Matrix> u_series);

/// Same averaging applied to masked target or prediction matrices.
Vector mean_targets(std::span<const Matrix> q_matrix_series);

/// One mean-approximation RLS step with L1 shrinkage:
///   v = P u,  g = v / (lambda + v.u)
///   theta += g (q_pi_bar - q_bar)^T - kappa P sgn(theta)   (prior P, prior theta)
///   P <- (1/lambda)(P - g v^T)
void rls_update(RlsState& state, OutputParams& theta, const Vector& u_bar,
                const Vector& q_pi_bar, const Vector& q_bar);

/// Same step with explicit factors. Grouped updates pass the state's lambda
/// and kappa on the first rank-one addition of a train step and (1, 0) on
/// the rest, so forgetting and shrinkage act once per step.
void rls_update_with(RlsState& state, OutputParams& theta, const Vector& u_bar,
                     const Vector& q_pi_bar, const Vector& q_bar, double lambda, double kappa);

// One recorded minibatch in an update history; test support for the loss and
// gradient evaluators below. Production code never keeps this history.
struct MaskedSeries {
    std::vector<Matrix> u;                  // T batches, M x D
    std::vector<Matrix> q_pi;               // T masked target batches, M x A
    std::vector<std::vector<int>> actions;  // T lists of M taken actions
};

/// Forgetting-weighted squared loss over a history of masked minibatches,
/// (1/(2MT)) sum_n sum_k lambda^{t-n} |q_pi - masked(U theta)|_F^2.
double batch_loss(const OutputParams& theta, std::span<const MaskedSeries> history, double lambda);

/// Gradient of batch_loss in theta: -(1/(MT)) sum lambda^{t-n} U^T delta.
Matrix loss_gradient(const OutputParams& theta, std::span<const MaskedSeries> history, double lambda);

}  // namespace esnrls
