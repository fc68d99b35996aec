#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace zigzag::cli {

inline constexpr int kExitUsage = 64;

/// Runs one subcommand (solve, diagnose, ft2d, bench, profile). `args`
/// excludes the program name. Returns the process exit code: 0 success or
/// converged, 2 iteration cap, 3 numerical failure, 64 usage error. Output
/// files are written only after every flag has been validated.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace zigzag::cli
