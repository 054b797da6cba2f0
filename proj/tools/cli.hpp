#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ilr::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitRuntimeFailure = 3;

/// Runs the command line `args` (without the program name). Human-readable
/// output goes to `out`, diagnostics to `err`; artifacts go to --out paths.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ilr::cli
