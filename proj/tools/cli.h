#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace vpk::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  /// A verifier produced a counterexample or a refutation point.
  kCounterexample = 3,
  /// A verifier ran out of budget without a verdict.
  kInconclusive = 4,
};

/// Runs the command line `args` (without the program name). Human summaries go
/// to `out`, errors to `err`; machine-readable results are written under --out.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vpk::cli
