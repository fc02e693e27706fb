#ifndef RAINSTICK_DISTRIBUTIONS_HPP
#define RAINSTICK_DISTRIBUTIONS_HPP

// Site-probability laws p_j on the positive integers.
//
// Every law exposes its probabilities in log form: clock-based samplers need
// log p_j far past the point where p_j underflows a double. The common surface
// is captured by the SiteLaw concept:
//
//   log_pmf(j)            log P[X = j], j >= 1
//   log_tail(n)           log P[X > n], n >= 0
//   log_pmf_range(j, out) log_pmf(j), log_pmf(j+1), ... written into out
//   sample_beyond(n, rng) a draw of X conditioned on X > n
//
// sample_beyond(0, rng) is an unconditional draw.

#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "rainstick/rng.hpp"

namespace rainstick {

using Site = std::uint64_t;

template <class L>
concept SiteLaw = requires(L& law, Site j, Rng& rng, std::span<double> out) {
    { law.log_pmf(j) } -> std::convertible_to<double>;
    { law.log_tail(j) } -> std::convertible_to<double>;
    { law.sample_beyond(j, rng) } -> std::convertible_to<Site>;
    law.log_pmf_range(j, out);
};

/// Geo(p) on {1, 2, ...}: p_j = p (1-p)^(j-1).
class GeometricLaw {
public:
    explicit GeometricLaw(double p);

    double p() const noexcept { return p_; }

    double pmf(Site j) const;
    double log_pmf(Site j) const;
    double tail(Site n) const;
    double log_tail(Site n) const;
    void log_pmf_range(Site first, std::span<double> out) const;

    /// Closed-form inversion: n + 1 + floor(log(1-u) / log(1-p)).
    Site from_uniform(double u, Site beyond = 0) const;
    Site sample_beyond(Site n, Rng& rng) const { return from_uniform(rng.uniform(), n); }

private:
    double p_;
    double log_p_;
    double log_q_;  // log(1 - p), -inf when p == 1
};

/// P[X >= k] = C e^{-k^alpha} with C = e so that P[X >= 1] = 1.
class StretchedExpLaw {
public:
    explicit StretchedExpLaw(double alpha);

    double alpha() const noexcept { return alpha_; }
    static double c_alpha() noexcept;

    double pmf(Site k) const;
    double log_pmf(Site k) const;
    double tail(Site n) const;
    double log_tail(Site n) const;
    void log_pmf_range(Site first, std::span<double> out) const;

    /// Tail inversion with a one-step local correction.
    Site from_uniform(double u, Site beyond = 0) const;
    Site sample_beyond(Site n, Rng& rng) const { return from_uniform(rng.uniform_open(), n); }

private:
    // (k+1)^alpha - k^alpha without cancellation.
    double power_gap(Site k) const;

    double alpha_;
};

/// How stick-breaking weights W_i are produced.
class WeightSource {
public:
    using Sampler = std::function<double(Rng&)>;

    static WeightSource constant(double w);
    static WeightSource uniform();
    static WeightSource custom(Sampler sampler);

    std::optional<double> constant_value() const noexcept { return constant_; }
    double draw(Rng& rng) const;

private:
    WeightSource() = default;
    std::optional<double> constant_;
    Sampler sampler_;
};

/// One realization of stick-breaking probabilities
///   p_j = (1 - W_1) ... (1 - W_{j-1}) W_j.
///
/// Weights are drawn on demand from a private stream seeded at construction,
/// so a realization is a deterministic function of the construction rng state
/// no matter in which order sites are queried. Not thread-safe; one
/// realization belongs to one replicate.
class SieveRealization {
public:
    SieveRealization(WeightSource source, Site horizon, Rng& rng);

    Site realized() const noexcept { return static_cast<Site>(weights_.size()); }
    void extend_to(Site n);

    double weight(Site j);
    double pmf(Site j);
    double log_pmf(Site j);
    /// Mass remaining after n sites, prod_{i<=n} (1 - W_i).
    double remaining_mass(Site n) { return std::exp(log_tail(n)); }
    double log_tail(Site n);
    void log_pmf_range(Site first, std::span<double> out);

    /// Walks sites n+1, n+2, ... stopping at j with probability W_j.
    Site sample_beyond(Site n, Rng& rng);

private:
    WeightSource source_;
    Rng weight_rng_;
    std::vector<double> weights_;
    std::vector<double> log_remaining_;  // log_remaining_[n] = sum_{i<=n} log(1 - W_i)
};

/// Builds a realization with `horizon` weights drawn up front.
SieveRealization sieve_realize(WeightSource source, Site horizon, Rng& rng);

double geo_pmf(double p, Site j);
double geo_log_pmf(double p, Site j);
double stretched_pmf(double alpha, Site k);

template <SiteLaw L>
Site sample_site(L& law, Rng& rng) {
    return law.sample_beyond(0, rng);
}

}  // namespace rainstick

#endif  // RAINSTICK_DISTRIBUTIONS_HPP
