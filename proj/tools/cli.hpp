#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ncdm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDegenerate = 1;
inline constexpr int kExitUsage = 2;

/// Parses `args` (args[0] is the program name) and runs the subcommand.
/// The machine-readable report goes to `out` only on success; diagnostics
/// and the one-line summary go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ncdm::cli
