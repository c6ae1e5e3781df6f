#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace polya::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kParse = 3,
    kDomain = 4,
    kNumerical = 5,
    kIo = 6,
};

/// Runs the `polya` command line with `args` (program name excluded). Regular
/// output goes to `out`; failures are written to `err` as one JSON object per line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace polya::cli
