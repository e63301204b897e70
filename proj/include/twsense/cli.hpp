#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace twsense::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // computation or input-file error
inline constexpr int kExitUsage = 2;

/// Runs one `twsense` invocation. `args` excludes the program name.
/// Subcommands: simulate, synth, calibrate, fit, contrast, range, rank.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace twsense::cli
