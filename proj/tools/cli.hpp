#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace seampos::cli {

enum ExitCode : int { kSuccess = 0, kDataFailure = 1, kUsage = 2 };

/// Runs one command line. `args` excludes the program name. Results go to
/// `out`, diagnostics and logs to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace seampos::cli
