#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace clickstat {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsageError = 2;

/// Runs the command line `args` (program name first). Normal output goes to
/// `out` unless --out names a file; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace clickstat
