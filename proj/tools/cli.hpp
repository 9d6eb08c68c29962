#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace toposval::cli {

/// Runs one subcommand. `args` excludes the program name. Returns the process
/// exit code: 0 when every check passes, 1 when a check fails, 2 on bad input.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace toposval::cli
