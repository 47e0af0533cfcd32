#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace loadsched::cli {

/// Exit codes returned by run().
enum ExitCode : int { kOk = 0, kInputError = 1, kInfeasible = 2 };

/// Runs one invocation; `args` includes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace loadsched::cli
