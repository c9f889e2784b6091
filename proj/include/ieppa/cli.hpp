#pragma once

#include <iosfwd>

#include "ieppa/error.hpp"

namespace ieppa::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitIo = 2,
  kExitParse = 3,
  kExitSolver = 4,
  kExitInfeasible = 5,
  kExitSizeGuard = 6,
  kExitInvalidData = 7,
};

int ExitCodeFor(ErrorKind kind);

// bench CSV header, fixed column order.
inline constexpr const char* kBenchHeader =
    "n1,n2,n3,seed,method,epsilon,normalized_obj,feasibility,iter,inner_iter,time_s,status";

// Entry point of the `ieppa` tool. Reports go to `out`, diagnostics to `err`.
int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ieppa::cli
