#include "esnrls/rng.hpp"

#include <stdexcept>

namespace esnrls {

int Rng::uniform_int(int n) {
    if (n <= 0) throw std::invalid_argument("Rng::uniform_int: n must be positive");
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t min = (-bound) % bound;  // 2^64 mod n
    std::uint64_t x;
    do {
        x = gen_();
    } while (x < min);
    return static_cast<int>(x % bound);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t root, std::string_view stream, std::uint64_t index) {
    return splitmix64(splitmix64(root ^ fnv1a64(stream)) + index);
}

}  // namespace esnrls
