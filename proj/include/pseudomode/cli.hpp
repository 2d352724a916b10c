#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pseudomode {

/// Runs the command-line tool in-process; args exclude the program name.
/// Returns the process exit code: 0 certified, 1 input or usage error,
/// 2 finished but uncertified.
int run_cli(std::vector<std::string> args, std::istream& in, std::ostream& out,
            std::ostream& err);

}  // namespace pseudomode
