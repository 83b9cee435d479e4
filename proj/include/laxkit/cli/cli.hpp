#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace laxkit::cli {

/// Exit codes of run().
enum ExitCode : int { Success = 0, Refuted = 1, UsageFailure = 2, InternalFailure = 3 };

/// Runs one command line, args without the program name. Output is deterministic for
/// identical inputs and seed unless --timing is given.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace laxkit::cli
