#ifndef RAINSTICK_PAINTSTICK_HPP
#define RAINSTICK_PAINTSTICK_HPP

// Paintstick process for Geo(p)-shifted permutations.
//
// A paintball at position x paints every position left of x red, removes x,
// and shifts everything right of x one place left. The red positions always
// form a prefix [1, r], so the whole state is the red count r:
//
//   x <= r : x was red and is removed        -> r - 1
//   x >  r : 1..x-1 become red, x is removed -> x - 1
//
// The first block is complete the first time r returns to 0; the number of
// steps taken is the block size K'.

#include <cstdint>

#include "rainstick/block_sampler.hpp"
#include "rainstick/rng.hpp"

namespace rainstick {

struct PaintState {
    std::uint64_t red_count = 0;
    std::uint64_t steps = 0;
};

std::uint64_t paintstick_step(std::uint64_t red_count, std::uint64_t x);

struct PaintOutcome {
    std::uint64_t k_prime = 0;  // steps taken (== K' unless capped)
    CapKind capped = CapKind::none;

    bool is_capped() const noexcept { return capped != CapKind::none; }
};

PaintOutcome sample_paintstick(double p, std::uint64_t step_cap, Rng& rng);

}  // namespace rainstick

#endif  // RAINSTICK_PAINTSTICK_HPP
