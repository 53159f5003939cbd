#include "esnrls/cartpole.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace esnrls {

namespace {

constexpr double kGravity = 9.8;
constexpr double kMassCart = 1.0;
constexpr double kMassPole = 0.1;
constexpr double kTotalMass = kMassCart + kMassPole;
constexpr double kHalfLength = 0.5;
constexpr double kPoleMassLength = kMassPole * kHalfLength;
constexpr double kForceMag = 10.0;
constexpr double kTau = 0.02;
constexpr double kXThreshold = 2.4;
const double kThetaThreshold = 12.0 * std::numbers::pi / 180.0;

}  // namespace

bool cartpole_terminal(const CartPoleState& s) {
    return s.x < -kXThreshold || s.x > kXThreshold || s.theta < -kThetaThreshold || s.theta > kThetaThreshold;
}

CartPoleState cartpole_reset(Rng& rng) {
    CartPoleState s;
    s.x = rng.uniform(-0.05, 0.05);
    s.x_dot = rng.uniform(-0.05, 0.05);
    s.theta = rng.uniform(-0.05, 0.05);
    s.theta_dot = rng.uniform(-0.05, 0.05);
    return s;
}

CartPoleState cartpole_integrate(const CartPoleState& s, double force, double tau) {
    const double costheta = std::cos(s.theta);
    const double sintheta = std::sin(s.theta);
    const double temp = (force + kPoleMassLength * s.theta_dot * s.theta_dot * sintheta) / kTotalMass;
    const double theta_acc = (kGravity * sintheta - costheta * temp) /
                             (kHalfLength * (4.0 / 3.0 - kMassPole * costheta * costheta / kTotalMass));
    const double x_acc = temp - kPoleMassLength * theta_acc * costheta / kTotalMass;
    CartPoleState next;
    next.x = s.x + tau * s.x_dot;
    next.x_dot = s.x_dot + tau * x_acc;
    next.theta = s.theta + tau * s.theta_dot;
    next.theta_dot = s.theta_dot + tau * theta_acc;
    return next;
}

CartPoleStepResult cartpole_step(const CartPoleState& state, int action) {
    if (action != 0 && action != 1) throw std::invalid_argument("cartpole_step: action must be 0 or 1");
    if (cartpole_terminal(state)) throw std::logic_error("cartpole_step: stepping a terminal state");
    CartPoleStepResult out;
    out.state = cartpole_integrate(state, action == 1 ? kForceMag : -kForceMag, kTau);
    out.reward = 1.0;
    out.terminal = cartpole_terminal(out.state);
    return out;
}

Vector observe(const CartPoleState& s, ObservationMode mode) {
    if (mode == ObservationMode::full4) {
        Vector v(4);
        v << s.x, s.x_dot, s.theta, s.theta_dot;
        return v;
    }
    Vector v(3);
    v << s.x, s.theta, s.theta_dot;
    return v;
}

double shape_terminal_reward(int steps_survived, int max_steps, double raw_reward) {
    return steps_survived < max_steps ? -10.0 : raw_reward;
}

Vector CartPoleEnv::reset() {
    state_ = cartpole_reset(rng_);
    return observe(state_, mode_);
}

CartPoleStepResult CartPoleEnv::step_raw(int action) {
    CartPoleStepResult out = cartpole_step(state_, action);
    state_ = out.state;
    return out;
}

}  // namespace esnrls
