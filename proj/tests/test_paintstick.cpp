#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"

#include "rainstick/distributions.hpp"
#include "rainstick/errors.hpp"
#include "rainstick/montecarlo.hpp"
#include "rainstick/paintstick.hpp"

using namespace rainstick;

namespace {

// Literal paintstick: a row of integers 1..width, each possibly red. A ball at
// position x paints positions 1..x-1 red and removes the integer at x, which
// becomes the next permutation value.
struct LiteralPaintstick {
    struct Cell {
        std::uint64_t value;
        bool red;
    };
    std::vector<Cell> row;
    std::vector<std::uint64_t> perm;

    explicit LiteralPaintstick(std::uint64_t width) {
        for (std::uint64_t v = 1; v <= width; ++v) row.push_back({v, false});
    }
    void drop(std::uint64_t x) {
        REQUIRE(x <= row.size());
        for (std::uint64_t i = 0; i + 1 < x; ++i) row[i].red = true;
        perm.push_back(row[x - 1].value);
        row.erase(row.begin() + static_cast<std::ptrdiff_t>(x - 1));
    }
    std::uint64_t red_count() const {
        return static_cast<std::uint64_t>(
            std::count_if(row.begin(), row.end(), [](const Cell& c) { return c.red; }));
    }
    bool red_is_prefix() const {
        const auto r = red_count();
        for (std::uint64_t i = 0; i < r; ++i)
            if (!row[i].red) return false;
        return true;
    }
};

// Size of the first block of a permutation prefix, 0 if none closes yet.
std::uint64_t first_block(const std::vector<std::uint64_t>& perm) {
    std::uint64_t mx = 0;
    for (std::size_t i = 0; i < perm.size(); ++i) {
        mx = std::max(mx, perm[i]);
        if (mx == i + 1) return mx;
    }
    return 0;
}

}  // namespace

TEST_CASE("paintstick step rule") {
    CHECK(paintstick_step(0, 1) == 0);
    CHECK(paintstick_step(3, 2) == 2);
    CHECK(paintstick_step(1, 5) == 4);
    CHECK(paintstick_step(3, 3) == 2);
    CHECK(paintstick_step(3, 4) == 3);
    CHECK_THROWS_AS(paintstick_step(2, 0), DomainError);
}

TEST_CASE("red-count dynamics match a literal row simulation") {
    const GeometricLaw law(0.35);
    for (std::uint64_t seed = 0; seed < 3000; ++seed) {
        Rng draws(seed);
        LiteralPaintstick lit(4000);
        std::uint64_t r = 0;
        std::uint64_t steps = 0;
        do {
            const Site x = law.sample_beyond(0, draws);
            if (x > lit.row.size()) break;  // vanishingly rare at this width
            lit.drop(x);
            r = paintstick_step(r, x);
            ++steps;
            CHECK(lit.red_is_prefix());
            CHECK(r == lit.red_count());
        } while (r != 0 && steps < 2000);
        if (r != 0) continue;
        // block size equals the time taken
        CHECK(first_block(lit.perm) == steps);

        Rng replay(seed);
        const PaintOutcome out = sample_paintstick(0.35, 1'000'000, replay);
        CHECK_FALSE(out.is_capped());
        CHECK(out.k_prime == steps);
    }
}

TEST_CASE("first step completes with probability p") {
    constexpr int kReps = 100'000;
    const double p = 0.5;
    int ones = 0;
    for (int i = 0; i < kReps; ++i) {
        Rng rng = Rng::for_replicate(3, i);
        const PaintOutcome out = sample_paintstick(p, 1'000'000'000, rng);
        CHECK(out.k_prime >= 1);
        ones += out.k_prime == 1;
    }
    CHECK(std::abs(static_cast<double>(ones) / kReps - p) < 3.0 * std::sqrt(p * (1 - p) / kReps));

    int near_one = 0;
    for (int i = 0; i < 1000; ++i) {
        Rng rng = Rng::for_replicate(4, i);
        near_one += sample_paintstick(0.999, 100, rng).k_prime == 1;
    }
    CHECK(near_one >= 990);
}

TEST_CASE("median block size grows as p falls") {
    constexpr int kReps = 100'000;
    double prev = 0.0;
    for (double p : {0.5, 0.4, 0.3}) {
        std::vector<double> ks(kReps);
        for (int i = 0; i < kReps; ++i) {
            Rng rng = Rng::for_replicate(7, i);
            ks[i] = static_cast<double>(sample_paintstick(p, 1'000'000'000, rng).k_prime);
        }
        const double med = summarize(ks).median;
        CHECK(med >= prev);
        prev = med;
    }
}

TEST_CASE("step cap") {
    Rng rng(11);
    int capped = 0;
    for (int i = 0; i < 500; ++i) {
        const PaintOutcome out = sample_paintstick(0.2, 3, rng);
        CHECK(out.k_prime <= 3);
        if (out.is_capped()) {
            ++capped;
            CHECK(out.k_prime == 3);
            CHECK(out.capped == CapKind::step);
        }
    }
    CHECK(capped > 0);
    CHECK_THROWS_AS(sample_paintstick(0.0, 10, rng), DomainError);
    CHECK_THROWS_AS(sample_paintstick(0.5, 0, rng), DomainError);
}
