#pragma once

#include <ostream>

namespace expalg::cli {

enum ExitCode : int {
  kOk = 0,
  kInvariantFailure = 1,
  kParseFailure = 2,
  kDegenerateGeometry = 3,
  kNoSolutions = 4,
};

/// Entry point of the expalg command line tool (subcommands solve, verify,
/// invariants, monodromy). Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace expalg::cli
