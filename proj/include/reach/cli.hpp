#pragma once

#include <string>
#include <vector>

namespace reach::cli {

inline constexpr int kExitConverged = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitAnytime = 2;

/// Entry point of the `pomdp-reach` tool. Subcommands: solve, simulate,
/// generate, fixture. Returns the process exit code.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

/// Parses durations such as `900`, `5s`, `250ms`, `2m`, `2h` into seconds.
double parse_duration(const std::string& text);

}  // namespace reach::cli
