#include "rainstick/distributions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include "rainstick/errors.hpp"

namespace rainstick {

namespace {

constexpr double kSiteMax = 1.8e19;  // just under 2^64

Site clamp_to_site(double x) {
    if (!(x < kSiteMax)) return std::numeric_limits<Site>::max();
    return static_cast<Site>(x);
}

void require_site(Site j, const char* op) {
    if (j < 1) throw DomainError(std::string(op) + ": site index must be >= 1");
}

}  // namespace

// ---------------------------------------------------------------------------
// GeometricLaw

GeometricLaw::GeometricLaw(double p) : p_(p) {
    if (!(p > 0.0 && p <= 1.0)) throw DomainError("geometric law: p must lie in (0, 1]");
    log_p_ = std::log(p);
    log_q_ = p == 1.0 ? -std::numeric_limits<double>::infinity() : std::log1p(-p);
}

double GeometricLaw::pmf(Site j) const {
    require_site(j, "geo_pmf");
    return p_ * std::pow(1.0 - p_, static_cast<double>(j - 1));
}

double GeometricLaw::log_pmf(Site j) const {
    require_site(j, "geo_log_pmf");
    if (p_ == 1.0) return j == 1 ? 0.0 : -std::numeric_limits<double>::infinity();
    return log_p_ + static_cast<double>(j - 1) * log_q_;
}

double GeometricLaw::tail(Site n) const { return std::pow(1.0 - p_, static_cast<double>(n)); }

double GeometricLaw::log_tail(Site n) const {
    if (n == 0) return 0.0;
    return static_cast<double>(n) * log_q_;
}

void GeometricLaw::log_pmf_range(Site first, std::span<double> out) const {
    require_site(first, "geo_log_pmf");
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = log_pmf(first + i);
}

Site GeometricLaw::from_uniform(double u, Site beyond) const {
    if (p_ == 1.0) return beyond + 1;
    double jumps = std::floor(std::log1p(-u) / log_q_);
    return beyond + 1 + clamp_to_site(jumps);
}

// ---------------------------------------------------------------------------
// StretchedExpLaw

StretchedExpLaw::StretchedExpLaw(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw DomainError("stretched-exponential law: alpha must lie in (0, 1)");
}

double StretchedExpLaw::c_alpha() noexcept { return std::numbers::e; }

double StretchedExpLaw::power_gap(Site k) const {
    if (k == 0) return 1.0;
    double kd = static_cast<double>(k);
    return std::pow(kd, alpha_) * std::expm1(alpha_ * std::log1p(1.0 / kd));
}

double StretchedExpLaw::pmf(Site k) const { return std::exp(log_pmf(k)); }

double StretchedExpLaw::log_pmf(Site k) const {
    require_site(k, "stretched_pmf");
    double kd = static_cast<double>(k);
    return 1.0 - std::pow(kd, alpha_) + std::log(-std::expm1(-power_gap(k)));
}

double StretchedExpLaw::tail(Site n) const {
    // Extended precision keeps differences of neighbouring tails accurate.
    const long double a = static_cast<long double>(alpha_);
    return static_cast<double>(std::exp(1.0L - std::pow(static_cast<long double>(n) + 1.0L, a)));
}

double StretchedExpLaw::log_tail(Site n) const {
    return 1.0 - std::pow(static_cast<double>(n) + 1.0, alpha_);
}

void StretchedExpLaw::log_pmf_range(Site first, std::span<double> out) const {
    require_site(first, "stretched_pmf");
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = log_pmf(first + i);
}

Site StretchedExpLaw::from_uniform(double u, Site beyond) const {
    // Smallest k > beyond with tail(k) <= u * tail(beyond), i.e.
    // (k+1)^alpha >= (beyond+1)^alpha - log u.
    const double target = std::pow(static_cast<double>(beyond) + 1.0, alpha_) - std::log(u);
    auto reaches = [&](Site k) {
        return std::pow(static_cast<double>(k) + 1.0, alpha_) >= target;
    };
    Site k = clamp_to_site(std::ceil(std::pow(target, 1.0 / alpha_) - 1.0));
    if (k <= beyond) k = beyond + 1;
    if (k == std::numeric_limits<Site>::max()) return k;
    if (k > beyond + 1 && reaches(k - 1)) --k;
    while (!reaches(k)) ++k;
    return k;
}

// ---------------------------------------------------------------------------
// WeightSource

WeightSource WeightSource::constant(double w) {
    if (!(w > 0.0 && w < 1.0)) throw DomainError("sieve weight must lie in (0, 1)");
    WeightSource s;
    s.constant_ = w;
    return s;
}

WeightSource WeightSource::uniform() {
    WeightSource s;
    s.sampler_ = [](Rng& rng) { return rng.uniform_open(); };
    return s;
}

WeightSource WeightSource::custom(Sampler sampler) {
    if (!sampler) throw DomainError("sieve weight sampler is empty");
    WeightSource s;
    s.sampler_ = std::move(sampler);
    return s;
}

double WeightSource::draw(Rng& rng) const {
    if (constant_) return *constant_;
    return sampler_(rng);
}

// ---------------------------------------------------------------------------
// SieveRealization

SieveRealization::SieveRealization(WeightSource source, Site horizon, Rng& rng)
    : source_(std::move(source)), weight_rng_(mix64(rng())) {
    log_remaining_.push_back(0.0);
    extend_to(horizon);
}

void SieveRealization::extend_to(Site n) {
    weights_.reserve(n);
    while (weights_.size() < n) {
        double w = source_.draw(weight_rng_);
        if (!(w > 0.0 && w < 1.0)) throw DomainError("sieve weight must lie in (0, 1)");
        weights_.push_back(w);
        if (auto c = source_.constant_value()) {
            // Same formula as GeometricLaw::log_tail.
            log_remaining_.push_back(static_cast<double>(weights_.size()) * std::log1p(-*c));
        } else {
            log_remaining_.push_back(log_remaining_.back() + std::log1p(-w));
        }
    }
}

double SieveRealization::weight(Site j) {
    require_site(j, "sieve weight");
    extend_to(j);
    return weights_[j - 1];
}

double SieveRealization::pmf(Site j) {
    require_site(j, "sieve pmf");
    if (auto c = source_.constant_value()) return GeometricLaw(*c).pmf(j);
    return std::exp(log_pmf(j));
}

double SieveRealization::log_pmf(Site j) {
    require_site(j, "sieve pmf");
    if (auto c = source_.constant_value()) return GeometricLaw(*c).log_pmf(j);
    extend_to(j);
    return log_remaining_[j - 1] + std::log(weights_[j - 1]);
}

double SieveRealization::log_tail(Site n) {
    extend_to(n);
    return log_remaining_[n];
}

void SieveRealization::log_pmf_range(Site first, std::span<double> out) {
    require_site(first, "sieve pmf");
    extend_to(first + out.size() - 1);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = log_pmf(first + i);
}

Site SieveRealization::sample_beyond(Site n, Rng& rng) {
    for (Site j = n + 1;; ++j) {
        if (rng.uniform() < weight(j)) return j;
    }
}

SieveRealization sieve_realize(WeightSource source, Site horizon, Rng& rng) {
    if (horizon < 1) throw DomainError("sieve_realize: horizon must be >= 1");
    return SieveRealization(std::move(source), horizon, rng);
}

// ---------------------------------------------------------------------------

double geo_pmf(double p, Site j) { return GeometricLaw(p).pmf(j); }

double geo_log_pmf(double p, Site j) { return GeometricLaw(p).log_pmf(j); }

double stretched_pmf(double alpha, Site k) { return StretchedExpLaw(alpha).pmf(k); }

}  // namespace rainstick
