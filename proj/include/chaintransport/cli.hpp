#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace chaintransport::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSolver = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command line (without the program name). Summaries go to `out`,
/// diagnostics and the machine-readable `error[...]` line to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace chaintransport::cli
