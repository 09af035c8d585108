#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace quantfix::cli {

/// Process exit codes. Values are stable.
enum ExitCode : int {
  kSuccess = 0,
  kConvergenceFailure = 1,
  kUsage = 2,
  kOracleFailure = 3,
  kToleranceFailure = 4,
};

/// Runs the command line `args` (args[0] is the program name). Artifacts go
/// to --out when given and to `out` otherwise; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace quantfix::cli
