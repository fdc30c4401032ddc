#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace uprop::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kDataError = 3,
  kMissingCheckpoint = 4,
};

/// Runs one `uprop` invocation. `args` excludes the program name. Regular
/// output goes to `out`, diagnostics to `err`; the return value is the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace uprop::cli
