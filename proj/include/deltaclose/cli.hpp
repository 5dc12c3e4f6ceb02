#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace deltaclose {

// Exit codes of the command line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitMalformed = 2,
  kExitInconsistent = 3,
  kExitNotDense = 4,
  kExitNotInvariant = 5,
  kExitVerificationFailed = 6,
};

// Runs one command (args excludes the program name) and writes its JSON
// report to out; diagnostics go to err.
int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace deltaclose
