#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace oxide {

enum ExitCode : int {
  kExitOk = 0,
  kExitIo = 1,
  kExitConfig = 2,
  kExitSolverFailure = 3,
  kExitWidthCollapse = 4,
};

/// Entry point of the `oxide` tool. `args` excludes the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, char** argv);

}  // namespace oxide
