#include "rainstick/experiments.hpp"

#include <algorithm>
#include <functional>
#include <iterator>

#include "rainstick/analytics.hpp"
#include "rainstick/errors.hpp"
#include "rainstick/paintstick.hpp"

namespace rainstick {

namespace {

Record from_block(std::uint64_t rep, const BlockOutcome& b) {
    return {rep, b.k, b.log_eta, b.n_drops, b.capped};
}

WeightSource weight_source(const ExperimentSpec& spec) {
    if (spec.weights == "uniform") return WeightSource::uniform();
    if (spec.weights == "constant") return WeightSource::constant(spec.weight);
    throw ConfigError("unknown sieve weights '" + spec.weights + "' (expected uniform or constant)");
}

// Runs `body(law, rng)` with a fresh law of the requested kind per replicate.
template <class Body>
std::vector<Record> run_with_law(const ExperimentSpec& spec, const RunConfig& config, Body body) {
    if (spec.dist == "geo") {
        const GeometricLaw law(spec.p);
        return run_replicated(config, [&](Rng& rng, std::uint64_t i) { return body(i, law, rng); });
    }
    if (spec.dist == "stretched") {
        const StretchedExpLaw law(spec.alpha);
        return run_replicated(config, [&](Rng& rng, std::uint64_t i) { return body(i, law, rng); });
    }
    if (spec.dist == "sieve") {
        const WeightSource source = weight_source(spec);
        return run_replicated(config, [&](Rng& rng, std::uint64_t i) {
            SieveRealization law(source, 32, rng);
            return body(i, law, rng);
        });
    }
    throw ConfigError("unknown site law '" + spec.dist + "' (expected geo, stretched or sieve)");
}

}  // namespace

void validate_experiment(const ExperimentSpec& spec) {
    static const char* const names[] = {"block",     "block-discrete", "forgetful",
                                        "paintstick", "stretched",      "sieve"};
    if (std::find(std::begin(names), std::end(names), spec.name) == std::end(names))
        throw ConfigError("unknown experiment '" + spec.name + "'");
    const bool uses_dist = spec.name == "block" || spec.name == "block-discrete";
    if (uses_dist) {
        if (spec.dist == "geo") GeometricLaw{spec.p};
        else if (spec.dist == "stretched") StretchedExpLaw{spec.alpha};
        else if (spec.dist == "sieve") weight_source(spec);
        else throw ConfigError("unknown site law '" + spec.dist + "'");
    } else if (spec.name == "stretched") {
        StretchedExpLaw{spec.alpha};
    } else if (spec.name == "sieve") {
        weight_source(spec);
    } else if (!(spec.p > 0.0 && spec.p < 1.0)) {
        throw DomainError(spec.name + ": p must lie in (0, 1)");
    }
    if (spec.escape_q && !(*spec.escape_q > 0.0 && *spec.escape_q <= 1.0))
        throw DomainError("escape_q must lie in (0, 1]");
}

std::vector<Record> run_experiment(const ExperimentSpec& spec, const RunConfig& config) {
    validate_experiment(spec);
    const Caps caps = config.caps;

    if (spec.name == "block" || spec.name == "stretched" || spec.name == "sieve") {
        ExperimentSpec s = spec;
        if (spec.name == "stretched") s.dist = "stretched";
        if (spec.name == "sieve") s.dist = "sieve";
        return run_with_law(s, config, [&](std::uint64_t i, auto& law, Rng& rng) {
            return from_block(i, sample_block_clocks(law, caps.site, rng));
        });
    }
    if (spec.name == "block-discrete") {
        return run_with_law(spec, config, [&](std::uint64_t i, auto& law, Rng& rng) {
            return from_block(i, sample_block_discrete(law, caps.drop, rng));
        });
    }
    if (spec.name == "forgetful") {
        const double q = spec.escape_q ? *spec.escape_q : escape_prob(spec.p);
        return run_replicated(config, [&](Rng& rng, std::uint64_t i) {
            return Record{i, sample_forgetful(spec.p, q, rng), std::nullopt, std::nullopt,
                          CapKind::none};
        });
    }
    // paintstick
    return run_replicated(config, [&](Rng& rng, std::uint64_t i) {
        const PaintOutcome o = sample_paintstick(spec.p, caps.step, rng);
        return Record{i, o.k_prime, std::nullopt, std::nullopt, o.capped};
    });
}

}  // namespace rainstick
