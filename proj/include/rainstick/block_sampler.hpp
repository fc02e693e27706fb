#ifndef RAINSTICK_BLOCK_SAMPLER_HPP
#define RAINSTICK_BLOCK_SAMPLER_HPP

// First block of a p-biased permutation.
//
// The primary sampler works with exponential clocks: under Poissonization,
// site j is first hit at T_j = E_j / p_j with independent standard
// exponentials E_j. The first block is the smallest k with
//
//     max_{j <= k} T_j  <  min_{j > k} T_j
//
// and its completion time is eta = max_{j <= k} T_j. Sites are realized in
// segments. Everything past the realized horizon J is summarized by one
// exponential of rate P[X > J] (the tail minimum). When no block fits inside
// the horizon, the tail minimum is pinned to a site drawn from X | X > J and
// the remaining unrealized clocks are that minimum plus fresh exponentials.
// All clock arithmetic is in logs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "rainstick/distributions.hpp"
#include "rainstick/errors.hpp"
#include "rainstick/rng.hpp"

namespace rainstick {

enum class CapKind { none, site, drop, step };

const char* cap_kind_name(CapKind kind) noexcept;

struct BlockOutcome {
    /// Block size. For capped outcomes: the largest site examined, K exceeds it.
    Site k = 0;
    /// log of the Poissonized completion time.
    double log_eta = 0.0;
    /// Exact number of drops; only the discrete sampler fills this.
    std::optional<std::uint64_t> n_drops;
    CapKind capped = CapKind::none;

    bool is_capped() const noexcept { return capped != CapKind::none; }
};

struct StreamBlock {
    bool complete = false;
    Site k = 0;                // block size when complete
    std::size_t n = 0;         // drops consumed (index of the completing drop)
    std::vector<Site> prefix;  // distinct values in order of appearance
    Site max_seen = 0;
};

/// Reads drops in order until the distinct values seen are exactly {1..m}.
/// Returns an incomplete result carrying the partial state when xs runs out.
StreamBlock first_block_from_stream(std::span<const Site> xs);

/// Running state of the clock sampler.
struct ClockState {
    Site horizon = 0;  // sites 1..horizon are realized
    double prefix_log_max = -std::numeric_limits<double>::infinity();
    double log_tail_min = 0.0;  // log min_{j > horizon} T_j
};

/// Every realized log clock, for diagnostics and tests.
struct ClockTrace {
    std::vector<double> log_clock;  // log T_1, ..., log T_horizon
    ClockState final_state;
};

struct ClockOptions {
    Site initial_horizon = 32;
    Site max_segment = Site{1} << 20;
};

namespace detail {

inline double log_add_exp(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b == -std::numeric_limits<double>::infinity() || a == std::numeric_limits<double>::infinity())
        return a;
    return a + std::log1p(std::exp(b - a));
}

}  // namespace detail

template <SiteLaw L>
BlockOutcome sample_block_clocks(L& law, Site site_cap, Rng& rng, ClockTrace* trace = nullptr,
                                 ClockOptions opts = {}) {
    if (site_cap < 1) throw DomainError("sample_block_clocks: site_cap must be >= 1");

    ClockState st;
    st.log_tail_min = rng.log_exponential() - law.log_tail(0);
    std::vector<double> seg;
    std::vector<double> suffix_min;
    if (trace) trace->log_clock.clear();

    auto finish = [&](BlockOutcome out) {
        if (trace) trace->final_state = st;
        return out;
    };
    auto capped = [&] {
        return finish({st.horizon, st.prefix_log_max, std::nullopt, CapKind::site});
    };

    for (;;) {
        const Site hit = law.sample_beyond(st.horizon, rng);
        if (hit > site_cap) return capped();

        const Site grow = std::clamp(st.horizon, opts.initial_horizon, opts.max_segment);
        Site end = std::max(hit, st.horizon + grow);
        end = std::min(end, site_cap);
        const std::size_t len = end - st.horizon;

        seg.resize(len);
        law.log_pmf_range(st.horizon + 1, seg);
        const double base = st.log_tail_min;
        for (std::size_t i = 0; i < len; ++i) {
            const Site site = st.horizon + 1 + i;
            seg[i] = site == hit ? base
                                 : detail::log_add_exp(base, rng.log_exponential() - seg[i]);
        }
        const double next_tail =
            detail::log_add_exp(base, rng.log_exponential() - law.log_tail(end));

        suffix_min.resize(len);
        double running = next_tail;
        for (std::size_t i = len; i-- > 0;) {
            suffix_min[i] = running;  // min over sites after index i
            running = std::min(running, seg[i]);
        }
        if (trace) trace->log_clock.insert(trace->log_clock.end(), seg.begin(), seg.end());

        double pm = st.prefix_log_max;
        for (std::size_t i = 0; i < len; ++i) {
            pm = std::max(pm, seg[i]);
            // Ties go to the lower site, which sits inside the block.
            if (pm <= suffix_min[i]) {
                st.horizon = end;
                st.prefix_log_max = pm;
                st.log_tail_min = next_tail;
                return finish({st.horizon - len + 1 + i, pm, std::nullopt, CapKind::none});
            }
        }
        st.horizon = end;
        st.prefix_log_max = pm;
        st.log_tail_min = next_tail;
        if (end == site_cap) return capped();
    }
}

/// Drop-by-drop simulation. Slow but exact for N; used as the oracle for the
/// clock sampler. Drop times are a rate-one Poisson process, so log_eta is
/// the log of the arrival time of the completing drop.
template <SiteLaw L>
BlockOutcome sample_block_discrete(L& law, std::uint64_t drop_cap, Rng& rng) {
    if (drop_cap < 1) throw DomainError("sample_block_discrete: drop_cap must be >= 1");
    std::vector<bool> wet;
    Site max_seen = 0;
    Site distinct = 0;
    double time = 0.0;
    for (std::uint64_t n = 1; n <= drop_cap; ++n) {
        const Site x = sample_site(law, rng);
        time += rng.exponential();
        max_seen = std::max(max_seen, x);
        // A block at max_seen needs at least max_seen drops.
        if (max_seen > drop_cap) break;
        if (x > wet.size()) wet.resize(std::max<std::size_t>(x, 2 * wet.size()));
        if (!wet[x - 1]) {
            wet[x - 1] = true;
            ++distinct;
        }
        if (max_seen == distinct) return {max_seen, std::log(time), n, CapKind::none};
    }
    return {max_seen, std::log(time), drop_cap, CapKind::drop};
}

/// Maximum at termination of the forgetful process: Geo(p) jumps, one per
/// fill attempt, until an attempt succeeds with probability escape_q.
/// Expected cost is 1 / escape_q iterations.
Site sample_forgetful(double p, double escape_q, Rng& rng);

BlockOutcome sample_stretched_block(double alpha, Site site_cap, Rng& rng);

}  // namespace rainstick

#endif  // RAINSTICK_BLOCK_SAMPLER_HPP
