#ifndef RAINSTICK_CLI_HPP
#define RAINSTICK_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace rainstick::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kDomain = 3,
    kNumeric = 4,
};

/// Runs exactly one subcommand. Results go to `out` unless --out names a
/// file; diagnostics go to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

const char* version() noexcept;

}  // namespace rainstick::cli

#endif  // RAINSTICK_CLI_HPP
