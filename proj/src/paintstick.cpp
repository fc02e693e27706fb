#include "rainstick/paintstick.hpp"

#include "rainstick/distributions.hpp"
#include "rainstick/errors.hpp"

namespace rainstick {

std::uint64_t paintstick_step(std::uint64_t red_count, std::uint64_t x) {
    if (x < 1) throw DomainError("paintstick_step: position must be >= 1");
    return x <= red_count ? red_count - 1 : x - 1;
}

PaintOutcome sample_paintstick(double p, std::uint64_t step_cap, Rng& rng) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("sample_paintstick: p must lie in (0, 1)");
    if (step_cap < 1) throw DomainError("sample_paintstick: step_cap must be >= 1");
    const GeometricLaw law(p);
    PaintState state;
    do {
        state.red_count = paintstick_step(state.red_count, law.sample_beyond(0, rng));
        ++state.steps;
        if (state.red_count == 0) return {state.steps, CapKind::none};
    } while (state.steps < step_cap);
    return {state.steps, CapKind::step};
}

}  // namespace rainstick
