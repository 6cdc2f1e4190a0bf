#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rcbir {

enum ExitCode : int { kExitOk = 0, kExitDomainError = 1, kExitUsage = 2 };

/// Runs the command line. args excludes the program name. Machine-readable
/// output goes to out, diagnostics to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rcbir
