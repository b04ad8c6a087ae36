#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace taumax::cli {

/// Runs the command line `args` (args[0] is the program name). Data goes to
/// `out`, diagnostics to `err`. Returns the process exit code: 0 on success,
/// 1 on a runtime error, 2 on a usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace taumax::cli
