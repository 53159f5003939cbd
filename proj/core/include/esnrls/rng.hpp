#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace esnrls {

// Deterministic random source. Distribution mapping is implemented here
// instead of <random>'s distribution classes so that streams are identical
// across standard libraries and platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer on [0, n), unbiased. n must be positive.
    int uniform_int(int n);

    bool bernoulli(double p) { return uniform01() < p; }

private:
    std::mt19937_64 gen_;
};

/// Stable child seed for a named stream: same (root, stream, index) always
/// yields the same seed, and distinct consumers do not shift each other.
std::uint64_t derive_seed(std::uint64_t root, std::string_view stream, std::uint64_t index = 0);

inline Rng substream(std::uint64_t root, std::string_view stream, std::uint64_t index = 0) {
    return Rng(derive_seed(root, stream, index));
}

}  // namespace esnrls
