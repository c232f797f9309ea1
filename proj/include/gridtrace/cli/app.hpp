#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gridtrace::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitNumerical = 4;

inline constexpr unsigned long long kDefaultSeed = 42;

/// Runs `gridtrace <ingest|baseline|regress|study|viz> [--config FILE] [flags]`.
/// `args` excludes the program name. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Exit code for an error code raised by the library.
int exit_code_for(const std::string& error_code);

}  // namespace gridtrace::cli
