#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace periph::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kInfeasible = 2;
inline constexpr int kVerifyFailed = 3;

/// Runs one command. `args` excludes the program name. Payload goes to
/// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace periph::cli
