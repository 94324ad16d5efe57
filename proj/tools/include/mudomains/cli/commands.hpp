#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mudomains/types.hpp"

namespace mudomains::cli {

/// Exit statuses of the mudomains tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitOutside = 1,   ///< member: Outside; scan/fixset/target/verify: a property failed
  kExitBoundary = 2,  ///< member: Boundary
  kExitUsage = 64,    ///< bad flags, bad arguments or map-spec parse error
  kExitData = 65,     ///< input rejected (point outside, invalid map, bad parameter)
  kExitPrecondition = 66,
  kExitAtomRange = 70,
  kExitNumeric = 71,
  kExitIo = 74,
};

int exit_code_for(ErrorCode code);

/// Runs one invocation; `args` excludes the program name. The envelope goes
/// to `out` unless --out names a file; human-readable lines go to `err` (or
/// to `out` when the envelope was written to a file).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mudomains::cli
