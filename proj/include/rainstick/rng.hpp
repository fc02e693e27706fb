#ifndef RAINSTICK_RNG_HPP
#define RAINSTICK_RNG_HPP

#include <cstdint>
#include <random>

namespace rainstick {

/// splitmix64 finalizer. A bijection on 64-bit words.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for replicate `index` under `master_seed`. Injective in `index` for a
/// fixed master seed, so no two replicates of a run share an initial state.
std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t index) noexcept;

/// Thin wrapper over mt19937_64. Variates are produced from raw engine output
/// with fixed formulas so streams are reproducible across standard libraries
/// (the std:: distributions are implementation-defined).
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    static Rng for_replicate(std::uint64_t master_seed, std::uint64_t index) {
        return Rng(derive_stream_seed(master_seed, index));
    }

    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }
    result_type operator()() { return engine_(); }

    /// Uniform on [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on the open interval (0, 1).
    double uniform_open() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard exponential variate (rate 1), strictly positive.
    double exponential();

    /// log of a standard exponential variate.
    double log_exponential();

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

}  // namespace rainstick

#endif  // RAINSTICK_RNG_HPP
