#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace trollscope::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kInternalFailure = 1;
inline constexpr int kUsageError = 2;

/// Runs one command line (without the program name). Diagnostics go to `err`,
/// short progress summaries to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace trollscope::cli
