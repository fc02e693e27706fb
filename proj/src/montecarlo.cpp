#include "rainstick/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "rainstick/errors.hpp"

namespace rainstick {

unsigned default_workers() {
    if (const char* env = std::getenv("RAINSTICK_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

double quantile_sorted(std::span<const double> sorted, double level) {
    if (sorted.empty()) throw DomainError("quantile of an empty sample");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * level;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double trimmed_mean_sorted(std::span<const double> sorted, double trim) {
    if (sorted.empty()) throw DomainError("trimmed mean of an empty sample");
    const auto cut = static_cast<std::size_t>(std::floor(trim * static_cast<double>(sorted.size())));
    const auto kept = sorted.subspan(cut, sorted.size() - 2 * cut);
    return std::accumulate(kept.begin(), kept.end(), 0.0) / static_cast<double>(kept.size());
}

Summary summarize(std::span<const double> values, std::size_t capped, std::size_t ecdf_limit) {
    if (values.empty()) throw DomainError("summarize: no uncapped samples");
    Summary s;
    s.count = values.size();
    s.capped = capped;
    s.capped_fraction = static_cast<double>(capped) / static_cast<double>(values.size() + capped);

    // Welford
    double mean = 0.0;
    double m2 = 0.0;
    std::size_t n = 0;
    for (double v : values) {
        ++n;
        const double d = v - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (v - mean);
    }
    s.mean = mean;
    s.variance = n > 1 ? std::max(0.0, m2 / static_cast<double>(n - 1)) : 0.0;
    const double se = std::sqrt(s.variance / static_cast<double>(n));
    s.ci95 = 1.959963984540054 * se;
    s.ci99 = 2.5758293035489004 * se;

    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < kQuantileLevels.size(); ++i)
        s.quantiles[i] = quantile_sorted(sorted, kQuantileLevels[i]);
    s.median = quantile_sorted(sorted, 0.5);
    s.trimmed_mean = trimmed_mean_sorted(sorted, 0.10);

    if (sorted.size() <= ecdf_limit) {
        s.ecdf = std::move(sorted);
    } else {
        // Reservoir over the input order with a fixed stream keeps the
        // summary a pure function of its input.
        Rng rng(0x5eed0ecdfULL);
        s.ecdf.assign(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(ecdf_limit));
        for (std::size_t i = ecdf_limit; i < values.size(); ++i) {
            const auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i + 1));
            if (j < ecdf_limit) s.ecdf[j] = values[i];
        }
        std::sort(s.ecdf.begin(), s.ecdf.end());
        s.ecdf_compressed = true;
    }
    return s;
}

double ecdf_at(const Summary& summary, double x) {
    if (summary.ecdf.empty()) return 0.0;
    const auto it = std::upper_bound(summary.ecdf.begin(), summary.ecdf.end(), x);
    return static_cast<double>(it - summary.ecdf.begin()) / static_cast<double>(summary.ecdf.size());
}

Interval bootstrap_ci(std::span<const double> values,
                      const std::function<double(std::span<const double>)>& statistic,
                      std::size_t resamples, double level, std::uint64_t seed) {
    if (values.empty()) throw DomainError("bootstrap_ci: empty sample");
    if (resamples < 2) throw DomainError("bootstrap_ci: needs at least two resamples");
    if (!(level > 0.0 && level < 1.0)) throw DomainError("bootstrap_ci: level must lie in (0, 1)");
    Rng rng(seed);
    std::vector<double> draw(values.size());
    std::vector<double> stats(resamples);
    for (auto& st : stats) {
        for (auto& d : draw)
            d = values[static_cast<std::size_t>(rng.uniform() * static_cast<double>(values.size()))];
        std::sort(draw.begin(), draw.end());
        st = statistic(draw);
    }
    std::sort(stats.begin(), stats.end());
    const double tail = (1.0 - level) / 2.0;
    return {quantile_sorted(stats, tail), quantile_sorted(stats, 1.0 - tail)};
}

DominanceResult dominance_check(std::span<const std::uint64_t> samples,
                                const std::function<double(double)>& survival,
                                double slack_sigmas) {
    DominanceResult out;
    if (samples.empty()) return out;
    std::vector<std::uint64_t> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const auto n = static_cast<double>(sorted.size());
    out.worst_gap = -std::numeric_limits<double>::infinity();

    // The empirical survival is flat on [s_i, s_{i+1}) while the bound falls,
    // so x = s - 1 for each distinct sample value s covers every integer x.
    auto check = [&](double x, std::size_t exceed) {
        const double emp = static_cast<double>(exceed) / n;
        const double q = std::clamp(survival(x), 0.0, 1.0);
        const double se = std::sqrt(q * (1.0 - q) / n);
        const double gap = emp - (q + slack_sigmas * se);
        if (gap > out.worst_gap) {
            out.worst_gap = gap;
            out.worst_x = x;
        }
    };
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i > 0 && sorted[i] == sorted[i - 1]) continue;
        check(static_cast<double>(sorted[i]) - 1.0, sorted.size() - i);
    }
    check(static_cast<double>(sorted.back()), 0);
    out.holds = out.worst_gap <= 0.0;
    return out;
}

double chi_square_sf(double statistic, double dof) {
    if (!(dof > 0.0)) throw DomainError("chi-square needs positive degrees of freedom");
    if (statistic <= 0.0) return 1.0;
    return boost::math::gamma_q(dof / 2.0, statistic / 2.0);
}

namespace {

std::vector<double> histogram(std::span<const std::uint64_t> xs, std::uint64_t cut) {
    std::vector<double> h(cut + 1, 0.0);  // h[0] is the overflow bin
    for (auto x : xs) {
        if (x < 1) throw DomainError("binned samples must be positive integers");
        h[x <= cut ? x : 0] += 1.0;
    }
    return h;
}

}  // namespace

double law_equality_test(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                         std::uint64_t support_cut) {
    if (a.empty() || b.empty()) throw DomainError("law_equality_test: empty sample");
    if (support_cut < 1) throw DomainError("law_equality_test: support_cut must be >= 1");
    auto ha = histogram(a, support_cut);
    auto hb = histogram(b, support_cut);
    for (std::uint64_t j = 1; j <= support_cut; ++j) {
        if (ha[j] + hb[j] < 5.0) {
            ha[0] += ha[j];
            hb[0] += hb[j];
            ha[j] = hb[j] = 0.0;
        }
    }
    const auto na = static_cast<double>(a.size());
    const auto nb = static_cast<double>(b.size());
    const double ra = std::sqrt(nb / na);
    const double rb = std::sqrt(na / nb);
    double stat = 0.0;
    int bins = 0;
    for (std::size_t j = 0; j < ha.size(); ++j) {
        const double tot = ha[j] + hb[j];
        if (tot == 0.0) continue;
        ++bins;
        const double d = ra * ha[j] - rb * hb[j];
        stat += d * d / tot;
    }
    if (bins < 2) throw DomainError("law_equality_test: degenerate support (fewer than two bins)");
    return chi_square_sf(stat, bins - 1);
}

double chi_square_gof(std::span<const std::uint64_t> samples,
                      const std::function<double(std::uint64_t)>& pmf,
                      std::uint64_t support_cut) {
    if (samples.empty()) throw DomainError("chi_square_gof: empty sample");
    if (support_cut < 1) throw DomainError("chi_square_gof: support_cut must be >= 1");
    const auto n = static_cast<double>(samples.size());
    auto observed = histogram(samples, support_cut);
    std::vector<double> expected(support_cut + 1, 0.0);
    double covered = 0.0;
    for (std::uint64_t j = 1; j <= support_cut; ++j) {
        expected[j] = n * pmf(j);
        covered += pmf(j);
    }
    expected[0] = n * std::max(0.0, 1.0 - covered);
    for (std::uint64_t j = 1; j <= support_cut; ++j) {
        if (expected[j] < 5.0) {
            expected[0] += expected[j];
            observed[0] += observed[j];
            expected[j] = observed[j] = 0.0;
        }
    }
    double stat = 0.0;
    int bins = 0;
    for (std::size_t j = 0; j < expected.size(); ++j) {
        if (expected[j] <= 0.0) {
            if (observed[j] > 0.0) return 0.0;  // mass where the law has none
            continue;
        }
        ++bins;
        const double d = observed[j] - expected[j];
        stat += d * d / expected[j];
    }
    if (bins < 2) throw DomainError("chi_square_gof: degenerate support (fewer than two bins)");
    return chi_square_sf(stat, bins - 1);
}

}  // namespace rainstick
