#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace holq::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kNotConverged = 2 };

/// Runs one command line (without the program name). Results go to `out`
/// (or the -o file), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace holq::cli
