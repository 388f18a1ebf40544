#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ssc::cli {

// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kNumericalFailure = 1,
  kInvalidInput = 2,
  kIoFailure = 3,
  kMaxIterExceeded = 4,
  kInterrupted = 130,
};

/// Runs `ssc <args...>` (args excludes the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ssc::cli
