#include "rainstick/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <tuple>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rainstick/errors.hpp"

namespace rainstick {

namespace {

using std::numbers::ln2;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(1 - e^{-x}) for x > 0.
double log1m_exp_neg(double x) { return std::log(-std::expm1(-x)); }

void require_probability(double p, const char* op) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError(std::string(op) + ": p must lie in (0, 1)");
}

// Adaptive Gauss-Kronrod over [a, b], split into `pieces` equal panels.
double integrate_finite(const std::function<double(double)>& f, double a, double b,
                        const QuadratureSpec& spec, int pieces = 1) {
    using boost::math::quadrature::gauss_kronrod;
    double total = 0.0;
    double total_err = 0.0;
    const double width = (b - a) / pieces;
    for (int i = 0; i < pieces; ++i) {
        const double lo = a + i * width;
        const double hi = i + 1 == pieces ? b : lo + width;
        double err = 0.0;
        total += gauss_kronrod<double, 15>::integrate(f, lo, hi, spec.max_refinements,
                                                      spec.rel_tol, &err);
        total_err += err;
    }
    if (!(total_err <= std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) ||
        !std::isfinite(total)) {
        char msg[96];
        std::snprintf(msg, sizeof msg, "quadrature did not reach tolerance (error estimate %.3g)",
                      total_err);
        throw NumericError(msg, total);
    }
    return total;
}

// log int_0^inf exp(log_f(s)) ds, for unimodal-ish log-integrands that vanish
// at both ends. Works in u = log s, locates the peak on a grid, keeps the
// window where the integrand is within exp(-depth) of the peak and integrates
// the peak-scaled integrand there.
double log_integral_positive_axis(const std::function<double(double)>& log_f,
                                  const QuadratureSpec& spec) {
    auto h = [&](double u) { return log_f(std::exp(u)) + u; };
    constexpr double kLo = -80.0;
    constexpr double kHi = 80.0;
    constexpr double kStep = 0.25;
    std::vector<double> grid;
    std::vector<double> vals;
    for (double u = kLo; u <= kHi; u += kStep) {
        grid.push_back(u);
        vals.push_back(h(u));
    }
    const auto peak_it = std::max_element(vals.begin(), vals.end());
    const double peak = *peak_it;
    if (!std::isfinite(peak)) throw NumericError("integrand has no finite mass", 0.0);

    const double depth = -std::log(std::min(spec.rel_tol, spec.abs_tol)) + 30.0;
    std::size_t first = vals.size();
    std::size_t last = 0;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (vals[i] >= peak - depth) {
            first = std::min(first, i);
            last = i;
        }
    }
    const double a = grid[first > 0 ? first - 1 : 0];
    const double b = grid[std::min(last + 1, grid.size() - 1)];
    if (first == 0 || last + 1 == grid.size())
        throw NumericError("integrand mass reaches the edge of the search window", 0.0);

    auto scaled = [&](double u) { return std::exp(h(u) - peak); };
    const int pieces = std::max(1, static_cast<int>(std::ceil(b - a)));
    // Tolerances apply to the scaled integral, whose peak is 1.
    const double integral = integrate_finite(scaled, a, b, spec, pieces);
    return peak + std::log(integral);
}

}  // namespace

void QuadratureSpec::validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
        throw DomainError("quadrature tolerances must be positive");
    if (max_refinements < 1) throw DomainError("quadrature needs at least one refinement");
}

double b_integrand(double y) { return log1m_exp_neg(ln2 * std::exp(y)); }

double compute_b(const QuadratureSpec& spec) {
    spec.validate();
    static std::mutex mu;
    static std::map<std::tuple<double, double, unsigned>, double> cache;
    const auto key = std::make_tuple(spec.abs_tol, spec.rel_tol, spec.max_refinements);
    {
        std::lock_guard lock(mu);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    // Past Y the integrand is about -exp(-x), x = ln2 e^y, and the remaining
    // mass is below exp(-x) / x.
    double upper = 0.0;
    for (;;) {
        const double x = ln2 * std::exp(upper);
        if (std::exp(-x) / x < 1e-3 * spec.abs_tol) break;
        upper += 0.25;
    }
    const double integral =
        integrate_finite(b_integrand, 0.0, upper, spec, static_cast<int>(std::ceil(upper)));
    const double b = ln2 - integral;
    std::lock_guard lock(mu);
    cache.emplace(key, b);
    return b;
}

double escape_prob(double p, const QuadratureSpec& spec) {
    require_probability(p, "escape_prob");
    spec.validate();
    const double lq = std::log1p(-p);
    const double rate = (1.0 - p) / p;  // the maximum advances at this rate
    // Conditioned on the advance time s, every site l behind the maximum
    // (rate (1-p)^{-l}) must already be wet.
    auto log_f = [&](double s) {
        double acc = std::log(rate) - s * rate;
        for (int l = 1;; ++l) {
            const double x = s * std::exp(-l * lq);
            if (x > kSaturation) break;
            acc += log1m_exp_neg(x);
        }
        return acc;
    };
    const double q = std::exp(log_integral_positive_axis(log_f, spec));
    return std::min(q, 1.0);
}

double log_pG(const GBlockQuery& q) {
    require_probability(q.p, "log_pG");
    if (q.j < 0) throw DomainError("log_pG: j must be >= 0");
    if (q.k < 1) throw DomainError("log_pG: k must be >= 1");
    if (!(q.t > 0.0)) throw DomainError("log_pG: t must be positive");

    const double lq = std::log1p(-q.p);
    const double log_t = std::log(q.t);
    auto x_at = [&](std::int64_t m) { return std::exp(log_t + static_cast<double>(m - q.k) * lq); };

    // x_m decreases in m; skip the saturated prefix.
    std::int64_t m_lo = 1;
    const double offset = std::log(kSaturation / q.t) / lq;
    if (std::isfinite(offset)) {
        m_lo = std::max<std::int64_t>(1, q.k + static_cast<std::int64_t>(std::ceil(offset)) - 1);
        while (m_lo <= q.j && x_at(m_lo) > kSaturation) ++m_lo;
    }
    double acc = 0.0;
    for (std::int64_t m = m_lo; m <= q.j; ++m) acc += log1m_exp_neg(x_at(m));
    acc -= x_at(q.j + 1) / q.p;
    return acc;
}

double j_star(double t, double p, std::int64_t k) {
    require_probability(p, "j_star");
    if (!(t > 0.0)) throw DomainError("j_star: t must be positive");
    return static_cast<double>(k) + std::log(ln2 / t) / std::log1p(-p);
}

std::int64_t j_of_t(double t, double p, std::int64_t k) {
    const double js = j_star(t, p, k);
    if (js < 0.0) return 0;
    return static_cast<std::int64_t>(std::floor(js));
}

double pk_upper_bound(std::int64_t k, double p, const QuadratureSpec& spec) {
    require_probability(p, "pk_upper_bound");
    if (k < 1) throw DomainError("pk_upper_bound: k must be >= 1");
    spec.validate();
    auto log_f = [&](double t) { return log_pG({k, k, t, p}); };
    return (1.0 - p) / p * std::exp(log_integral_positive_axis(log_f, spec));
}

RatioCheck ratio_bound_check(std::int64_t k, double p, double t, double n) {
    require_probability(p, "ratio_bound_check");
    if (k < 1) throw DomainError("ratio_bound_check: k must be >= 1");
    if (!(t >= 3.0 * ln2 * (1.0 - 1e-14)))
        throw DomainError("ratio_bound_check: t must be at least 3 log 2");
    RatioCheck out;
    out.j = j_of_t(t, p, k);
    if (out.j <= k) throw DomainError("ratio_bound_check: requires j(t) > k");

    const double lq = std::log1p(-p);
    double acc = 0.0;
    for (std::int64_t l = 1; l <= out.j - k; ++l) {
        const double x = t * std::exp(static_cast<double>(l) * lq);
        acc += -x - log1m_exp_neg(x);
    }
    out.log_ratio = acc;
    out.ratio = std::exp(acc);
    out.bound = std::pow(t, -n);
    out.holds = acc <= -n * std::log(t);
    out.ell_star = -std::log(t) / lq;
    out.gamma = -std::log(std::exp(-1.0) / (1.0 - std::exp(-1.0)));
    out.geometric_bound = std::pow(t, -out.gamma / std::abs(lq));
    return out;
}

double dominance_rate(double p) {
    require_probability(p, "dominance_rate");
    return p * std::exp(-compute_b() / p);
}

}  // namespace rainstick
