#ifndef RAINSTICK_EXPERIMENTS_HPP
#define RAINSTICK_EXPERIMENTS_HPP

// Named samplers runnable through the replication harness.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rainstick/block_sampler.hpp"
#include "rainstick/montecarlo.hpp"

namespace rainstick {

struct ExperimentSpec {
    // block, block-discrete, forgetful, paintstick, stretched, sieve
    std::string name = "block";
    // Site law for block / block-discrete: geo, stretched, sieve
    std::string dist = "geo";
    double p = 0.5;
    double alpha = 0.5;
    // Sieve weights: uniform or constant (constant uses `weight`)
    std::string weights = "uniform";
    double weight = 0.5;
    // Forgetful escape probability; computed from p when unset.
    std::optional<double> escape_q;
};

/// One replicate. k holds K, K' (paintstick) or the forgetful maximum.
struct Record {
    std::uint64_t rep = 0;
    Site k = 0;
    std::optional<double> log_eta;
    std::optional<std::uint64_t> n;
    CapKind capped = CapKind::none;
};

/// Throws ConfigError for unknown names or laws, DomainError for parameters
/// outside their ranges.
void validate_experiment(const ExperimentSpec& spec);

std::vector<Record> run_experiment(const ExperimentSpec& spec, const RunConfig& config);

}  // namespace rainstick

#endif  // RAINSTICK_EXPERIMENTS_HPP
