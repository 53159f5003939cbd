#pragma once

#include <span>
#include <string>

#include "esnrls/replay.hpp"
#include "esnrls/rng.hpp"
#include "esnrls/types.hpp"

namespace esnrls {

enum class ControlKind { q_learning, sarsa };

// What the experiment loop needs from any learner.
class Agent {
public:
    virtual ~Agent() = default;
    virtual void begin_episode() = 0;
    virtual int act(const Vector& observation, Rng& rng) = 0;
    virtual void train_step(std::span<const TransitionSeries> minibatch) = 0;
    virtual void sync_target() = 0;
    virtual std::string snapshot_json() const = 0;
};

}  // namespace esnrls
