#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cmjp::cli {

enum ExitCode { kOk = 0, kUsage = 1, kDataError = 2, kNumericError = 3 };

// Runs the command line (args excludes the program name). Diagnostics go to
// err; documents written to "-" go to out.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cmjp::cli
