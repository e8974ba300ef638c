#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mvfuse::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kRuntimeError = 1;
inline constexpr int kUsageError = 2;

// Runs the tool with `args` (without the program name). Machine-readable
// output goes to `out`, diagnostics and progress to `err`.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace mvfuse::cli
