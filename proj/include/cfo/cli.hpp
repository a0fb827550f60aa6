#pragma once

namespace cfo {

// Exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 2,
  kExitDiverged = 3,
  kExitNumeric = 4,
};

int run_cli(int argc, const char* const* argv);

}  // namespace cfo
