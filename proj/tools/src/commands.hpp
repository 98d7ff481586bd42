#pragma once

// Command-line front end. Every number it prints comes from a library call;
// this layer only parses flags, dispatches and renders tables.

#include <ostream>
#include <string>
#include <vector>

namespace dipolegate::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitValidation = 2;

// Splices the flags of a JSON config file (--config) into the argument list.
// Keys mirror long flag names without the leading dashes; "command" names the
// subcommand. Arguments given on the command line win over the file.
std::vector<std::string> expand_config(const std::vector<std::string>& args);

// Runs the tool; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dipolegate::cli
