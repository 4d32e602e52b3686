#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rsi::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `rsi` tool. `args` excludes the program name.
///
/// Subcommands: example, gen, score, check, simulate, sweep, ensemble.
/// Returns 0 on success, 1 when an input fails validation (or a consistency
/// check fails), 2 on a usage error.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rsi::cli
