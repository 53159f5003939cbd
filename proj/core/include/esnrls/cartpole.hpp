#pragma once

#include "esnrls/rng.hpp"
#include "esnrls/types.hpp"

namespace esnrls {

struct CartPoleState {
    double x = 0.0;
    double x_dot = 0.0;
    double theta = 0.0;
    double theta_dot = 0.0;
};

enum class ObservationMode { full4, partial3 };

inline int observation_dim(ObservationMode mode) { return mode == ObservationMode::full4 ? 4 : 3; }

bool cartpole_terminal(const CartPoleState& state);

/// Each component i.i.d. uniform on [-0.05, 0.05].
CartPoleState cartpole_reset(Rng& rng);

/// One explicit-Euler integration step of the cart-pole dynamics under a
/// horizontal force. Exposed separately so tests can drive the integrator
/// with zero force or a smaller time step.
CartPoleState cartpole_integrate(const CartPoleState& state, double force, double tau);

struct CartPoleStepResult {
    CartPoleState state;
    double reward = 1.0;
    bool terminal = false;
};

/// Apply action 0 (push left) or 1 (push right) for one 0.02 s step.
CartPoleStepResult cartpole_step(const CartPoleState& state, int action);

/// full4: (x, x_dot, theta, theta_dot); partial3 drops the cart velocity.
Vector observe(const CartPoleState& state, ObservationMode mode);

/// Failure shaping on an episode's final step: -10 unless the episode ran
/// the full max_steps.
double shape_terminal_reward(int steps_survived, int max_steps, double raw_reward);

// Owns one rolling episode's state; the bridge between the pure dynamics
// above and the experiment loops.
class CartPoleEnv {
public:
    CartPoleEnv(ObservationMode mode, std::uint64_t seed) : mode_(mode), rng_(seed) {}

    Vector reset();
    CartPoleStepResult step_raw(int action);
    Vector observe_current() const { return observe(state_, mode_); }
    const CartPoleState& state() const { return state_; }
    ObservationMode mode() const { return mode_; }
    int obs_dim() const { return observation_dim(mode_); }
    static constexpr int num_actions = 2;

private:
    ObservationMode mode_;
    Rng rng_;
    CartPoleState state_;
};

}  // namespace esnrls
