#pragma once

#include <deque>
#include <span>
#include <vector>

#include "esnrls/rng.hpp"
#include "esnrls/types.hpp"

namespace esnrls {

struct Transition {
    Vector s;
    int a = 0;
    Vector s_next;
    int a_next = 0;  // action actually taken at s_next; copies a on fill padding
    double r = 0.0;
    bool terminal = false;  // s_next is absorbing
};

// Fixed-length window of consecutive transitions; the unit of replay storage.
// A short tail window is padded by repeating the episode's last transition.
struct TransitionSeries {
    std::vector<Transition> steps;
    int fill_count = 0;
};

/// Split an episode into consecutive non-overlapping windows of length t_len,
/// padding the final window with copies of the last transition.
std::vector<TransitionSeries> segment_episode(std::span<const Transition> episode, int t_len);

class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(TransitionSeries series);
    std::size_t size() const { return storage_.size(); }
    std::size_t capacity() const { return capacity_; }
    const TransitionSeries& at(std::size_t i) const { return storage_[i]; }

    /// m series drawn uniformly with replacement; the buffer must be nonempty.
    std::vector<TransitionSeries> sample_minibatch(std::size_t m, Rng& rng) const;

private:
    std::size_t capacity_;
    std::deque<TransitionSeries> storage_;
};

/// Drop fill padding and splice series back into bare transitions.
std::vector<Transition> flatten_non_fill(std::span<const TransitionSeries> series);

}  // namespace esnrls
