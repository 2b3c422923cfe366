#pragma once

#include <string>
#include <vector>

namespace taskfc {

inline constexpr const char* kVersion = "0.1.0";

/// Command-line entry point (subcommands: simulate, estimate, compare,
/// bench). Returns 0 on success, 2 on validation/usage errors, 1 on runtime
/// failure. Exposed as a function so tests can drive the tool in-process.
int run_cli(const std::vector<std::string>& args);

}  // namespace taskfc
