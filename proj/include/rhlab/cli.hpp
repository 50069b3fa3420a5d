#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rhlab::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
    kSuccess = 0,      ///< ran and every validation passed
    kCheckFailed = 1,  ///< computation or validation failure
    kBadArguments = 2,
};

/// Entry point behind the `rhlab` executable. `args` excludes the program name.
/// Output goes to --out/--out-dir when given, otherwise to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rhlab::cli
