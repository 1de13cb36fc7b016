#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace subguard {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitFindings = 1,
  kExitUnparseable = 2,
  kExitUsage = 3,
  kExitInternal = 4,
};

/// Runs the command line `args` (args[0] is the program name). Data goes to
/// `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace subguard
