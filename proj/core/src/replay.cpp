#include "esnrls/replay.hpp"

#include <stdexcept>

namespace esnrls {

std::vector<TransitionSeries> segment_episode(std::span<const Transition> episode, int t_len) {
    if (episode.empty()) throw std::invalid_argument("segment_episode: empty episode");
    if (t_len < 1) throw std::invalid_argument("segment_episode: t_len must be >= 1");
    std::vector<TransitionSeries> out;
    const std::size_t len = episode.size();
    const std::size_t window = static_cast<std::size_t>(t_len);
    for (std::size_t start = 0; start < len; start += window) {
        TransitionSeries series;
        series.steps.reserve(window);
        const std::size_t real = std::min(window, len - start);
        for (std::size_t k = 0; k < real; ++k) series.steps.push_back(episode[start + k]);
        for (std::size_t k = real; k < window; ++k) series.steps.push_back(episode[len - 1]);
        series.fill_count = static_cast<int>(window - real);
        out.push_back(std::move(series));
    }
    return out;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
}

void ReplayBuffer::push(TransitionSeries series) {
    storage_.push_back(std::move(series));
    if (storage_.size() > capacity_) storage_.pop_front();
}

std::vector<TransitionSeries> ReplayBuffer::sample_minibatch(std::size_t m, Rng& rng) const {
    if (storage_.empty()) throw std::invalid_argument("sample_minibatch: buffer is empty");
    std::vector<TransitionSeries> batch;
    batch.reserve(m);
    for (std::size_t i = 0; i < m; ++i)
        batch.push_back(storage_[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(storage_.size())))]);
    return batch;
}

std::vector<Transition> flatten_non_fill(std::span<const TransitionSeries> series) {
    std::vector<Transition> out;
    for (const TransitionSeries& s : series) {
        const std::size_t real = s.steps.size() - static_cast<std::size_t>(s.fill_count);
        for (std::size_t k = 0; k < real; ++k) out.push_back(s.steps[k]);
    }
    return out;
}

}  // namespace esnrls
