#ifndef RAINSTICK_ERRORS_HPP
#define RAINSTICK_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rainstick {

/// A numeric argument violated an operation's precondition.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A numerical routine failed to reach its tolerance. Carries the best
/// estimate obtained before giving up.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, double best_estimate)
        : std::runtime_error(what), best_estimate_(best_estimate) {}

    double best_estimate() const noexcept { return best_estimate_; }

private:
    double best_estimate_;
};

/// Malformed experiment or run configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace rainstick

#endif  // RAINSTICK_ERRORS_HPP
