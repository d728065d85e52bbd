#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hawkes_moments::cli {

enum ExitCode : int {
    kOk = 0,
    kValidationFailed = 1,
    kUsage = 2,
    kSizeCap = 3,
    kIo = 4,
};

/// Runs the command line `args` (args[0] is the program name) and returns the
/// process exit code. Results go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// One free grid axis "start:stop:steps" or a fixed time.
struct GridAxis {
    double start{0.0};
    double stop{0.0};
    std::size_t steps{1};
    bool free{false};

    double at(std::size_t i) const;
};

/// Parses "start:stop:steps" (free) or a plain number (fixed).
GridAxis parse_grid_axis(const std::string& text);

}  // namespace hawkes_moments::cli
