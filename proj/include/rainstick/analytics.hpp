#ifndef RAINSTICK_ANALYTICS_HPP
#define RAINSTICK_ANALYTICS_HPP

// Deterministic numerics for the Geo(p) rainstick.
//
// Time is rescaled so that site m rains at rate (1-p)^(m-k) for a reference
// site k. G_{j,t} is the event that at time t sites 1..j are wet and every
// site past j is dry; by Poisson thinning
//
//   log P[G_{j,t}] = sum_{m=1}^{j} log(1 - exp(-t (1-p)^(m-k)))
//                    - t (1-p)^(j+1-k) / p.
//
// Wet-side factors with t (1-p)^(m-k) > kSaturation are within e^-40 of one
// and are dropped.

#include <cstdint>

namespace rainstick {

inline constexpr double kSaturation = 40.0;

struct QuadratureSpec {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    unsigned max_refinements = 15;

    static QuadratureSpec with_tolerance(double tol) { return {tol, tol, 15}; }
    void validate() const;
};

struct GBlockQuery {
    std::int64_t j = 0;  // block endpoint, >= 0
    std::int64_t k = 1;  // reference site, >= 1
    double t = 1.0;      // rescaled time, > 0
    double p = 0.5;
};

/// b = log 2 - int_0^inf log(1 - 2^{-e^y}) dy. Cached per tolerance.
double compute_b(const QuadratureSpec& spec = {});

/// log(1 - 2^{-e^y}), the integrand inside compute_b.
double b_integrand(double y);

/// Probability that every site behind a fresh maximum fills before the
/// maximum advances again (forgetful process). Bounded below by e^{-b/p}.
double escape_prob(double p, const QuadratureSpec& spec = {});

double log_pG(const GBlockQuery& q);

/// Real root j* of t (1-p)^(j*-k) = log 2.
double j_star(double t, double p, std::int64_t k);

/// Integer j >= 0 maximizing P[G_{j,t}]: floor(j*) clamped at 0.
std::int64_t j_of_t(double t, double p, std::int64_t k);

/// Upper bound on P[K = k]: (1-p)/p * int_0^inf P[G_{k,t}] dt.
double pk_upper_bound(std::int64_t k, double p, const QuadratureSpec& spec = {});

struct RatioCheck {
    double ratio = 0.0;      // P[G_{k,t}] / P[G_{j(t),t}]
    double log_ratio = 0.0;
    double bound = 0.0;      // t^{-n}
    bool holds = false;
    std::int64_t j = 0;      // j(t)
    double ell_star = 0.0;   // solves t (1-p)^ell = 1
    double gamma = 0.0;      // -log(e^-1 / (1 - e^-1))
    double geometric_bound = 0.0;  // t^{-gamma / |log(1-p)|}
};

/// Requires t >= 3 log 2 and j(t) > k.
RatioCheck ratio_bound_check(std::int64_t k, double p, double t, double n);

/// p e^{-b/p}, the success rate of the dominating geometric law.
double dominance_rate(double p);

}  // namespace rainstick

#endif  // RAINSTICK_ANALYTICS_HPP
