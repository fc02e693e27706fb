#ifndef RAINSTICK_MONTECARLO_HPP
#define RAINSTICK_MONTECARLO_HPP

// Replication harness and estimators.
//
// Replicate i always runs on Rng::for_replicate(master_seed, i) and writes
// slot i of the result vector, so results do not depend on the worker count.

#include <array>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <span>
#include <thread>
#include <type_traits>
#include <vector>

#include "rainstick/distributions.hpp"
#include "rainstick/rng.hpp"

namespace rainstick {

struct Caps {
    Site site = 100'000'000;
    std::uint64_t drop = 1'000'000'000;
    std::uint64_t step = 1'000'000'000;
};

struct RunConfig {
    std::uint64_t master_seed = 0;
    std::uint64_t reps = 0;
    unsigned workers = 1;
    Caps caps;
};

/// RAINSTICK_WORKERS if set and positive, else the hardware concurrency.
unsigned default_workers();

template <class Fn>
auto run_replicated(const RunConfig& config, Fn&& fn)
    -> std::vector<std::invoke_result_t<Fn&, Rng&, std::uint64_t>> {
    using R = std::invoke_result_t<Fn&, Rng&, std::uint64_t>;
    std::vector<R> results(config.reps);
    if (config.reps == 0) return results;

    const std::uint64_t workers =
        std::min<std::uint64_t>(std::max(1u, config.workers), config.reps);
    auto run_range = [&](std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t i = begin; i < end; ++i) {
            Rng rng = Rng::for_replicate(config.master_seed, i);
            results[i] = fn(rng, i);
        }
    };
    if (workers == 1) {
        run_range(0, config.reps);
        return results;
    }

    std::exception_ptr failure;
    std::mutex failure_mu;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::uint64_t w = 0; w < workers; ++w) {
        const std::uint64_t begin = config.reps * w / workers;
        const std::uint64_t end = config.reps * (w + 1) / workers;
        pool.emplace_back([&, begin, end] {
            try {
                run_range(begin, end);
            } catch (...) {
                std::lock_guard lock(failure_mu);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return results;
}

inline constexpr std::array<double, 7> kQuantileLevels{0.01, 0.05, 0.25, 0.50, 0.75, 0.95, 0.99};

struct Summary {
    std::size_t count = 0;   // uncapped samples
    std::size_t capped = 0;
    double capped_fraction = 0.0;
    double mean = 0.0;
    double variance = 0.0;   // unbiased; 0 for a single sample
    double ci95 = 0.0;       // normal-approximation half-widths
    double ci99 = 0.0;
    std::array<double, 7> quantiles{};  // at kQuantileLevels
    double median = 0.0;
    double trimmed_mean = 0.0;  // 10% trimmed from each end
    std::vector<double> ecdf;   // sorted samples, or a sorted reservoir subsample
    bool ecdf_compressed = false;
};

/// Normal-approximation intervals understate uncertainty for heavy-tailed
/// samples; quantiles and bootstrap_ci are the robust alternatives.
Summary summarize(std::span<const double> values, std::size_t capped = 0,
                  std::size_t ecdf_limit = 1'000'000);

/// Linear-interpolation quantile of sorted data (the "type 7" rule).
double quantile_sorted(std::span<const double> sorted, double level);

double trimmed_mean_sorted(std::span<const double> sorted, double trim);

/// Fraction of ECDF samples <= x.
double ecdf_at(const Summary& summary, double x);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Percentile bootstrap interval for an arbitrary statistic.
Interval bootstrap_ci(std::span<const double> values,
                      const std::function<double(std::span<const double>)>& statistic,
                      std::size_t resamples, double level, std::uint64_t seed);

struct DominanceResult {
    bool holds = true;
    double worst_x = 0.0;
    /// max over x of emp P[S > x] - (bound(x) + slack * se(x)); > 0 is a violation.
    double worst_gap = 0.0;
};

/// Checks emp P[S > x] <= survival(x) + slack * sqrt(q(1-q)/n), q = survival(x),
/// for every integer x in the sample range.
DominanceResult dominance_check(std::span<const std::uint64_t> samples,
                                const std::function<double(double)>& survival,
                                double slack_sigmas);

/// Two-sample chi-square over bins {1..support_cut} plus one overflow bin.
/// Bins holding fewer than five pooled observations fold into the overflow.
double law_equality_test(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                         std::uint64_t support_cut);

/// One-sample chi-square goodness of fit against pmf on {1..support_cut} plus
/// overflow. Bins with expected count below five fold into the overflow.
double chi_square_gof(std::span<const std::uint64_t> samples,
                      const std::function<double(std::uint64_t)>& pmf,
                      std::uint64_t support_cut);

/// Upper tail of the chi-square distribution.
double chi_square_sf(double statistic, double dof);

}  // namespace rainstick

#endif  // RAINSTICK_MONTECARLO_HPP
