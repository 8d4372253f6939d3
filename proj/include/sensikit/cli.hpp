#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sensikit {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitDegenerate = 3, kExitIo = 4 };

/// Runs the tool on `args` (without the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sensikit
