#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace medner::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUnexpected = 1,
  kExitUsage = 2,
  kExitData = 3,
  kExitNumerical = 4,
};

/// Runs the `medner` command line. `args` excludes the program name.
/// Results and per-epoch progress go to `out`, warnings and errors to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace medner::cli
