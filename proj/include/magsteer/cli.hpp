#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace magsteer {

/// Process exit codes; stable for scripting.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 1,
  kExitUnstable = 2,
  kExitIoError = 3,
};

/// Runs the command line `args` (program name excluded) and returns the
/// exit code. All user-facing text goes to `out` / `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace magsteer
