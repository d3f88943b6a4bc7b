#pragma once
#include <string>
#include <vector>

namespace mvb {

// Full command-line entry point (subcommands: generate, detect, bootstrap,
// sweep). Returns the process exit code: 0 on success, 2 for usage or
// validation errors, 1 for runtime failures.
int run_cli(int argc, const char* const* argv);

// Convenience overload for in-process use; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args);

}  // namespace mvb
