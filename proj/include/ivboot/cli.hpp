#pragma once

#include <iosfwd>

namespace ivboot::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitComparisonFailed = 2;

// Parses argv, runs one subcommand and returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

} // namespace ivboot::cli
