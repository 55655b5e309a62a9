#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace condensed {

/// Exit codes of the command-line tool.
enum ExitCode : int { kSuccess = 0, kNegative = 1, kUsage = 2, kCapacity = 3 };

/// Runs one command; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace condensed
