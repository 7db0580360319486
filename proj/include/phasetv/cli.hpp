#pragma once

#include <iosfwd>

namespace phasetv {

/// Process exit codes of the phasetv tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitIo = 1,
  kExitUsage = 2,
  kExitDiverged = 3,
};

/// Entry point of the command-line tool. Results go to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace phasetv
