#pragma once

#include <iosfwd>

namespace filterforge::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kParseError = 2,
  kUnsupported = 3,
  kNumericFailure = 4,
};

/// Entry point of the filterforge command line. Output files are written
/// where --out points; everything else goes to out / err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace filterforge::cli
