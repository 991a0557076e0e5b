#pragma once

#include <iosfwd>

namespace flipit {

// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,          // invalid config, overrides or arguments; nothing written
  kExitRuntime = 3,         // failure while running or writing outputs
  kExitReplayMismatch = 4,  // replay found a row that does not recompute
  kExitBoundViolated = 5,   // theorem-check: measured regret above a bound
};

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace flipit
