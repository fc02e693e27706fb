#include "rainstick/rng.hpp"

#include <cmath>

namespace rainstick {

std::uint64_t mix64(std::uint64_t x) noexcept {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t index) noexcept {
    // Weyl step is injective in index (odd increment), mix64 is a bijection.
    return mix64(master_seed + 0x9e3779b97f4a7c15ULL * (index + 1));
}

double Rng::exponential() { return -std::log(uniform_open()); }

double Rng::log_exponential() { return std::log(exponential()); }

}  // namespace rainstick
