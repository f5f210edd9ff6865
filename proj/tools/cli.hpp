#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace singosc::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kNumericalDomain = 2 };

/// Runs one command line (program name excluded). Data goes to files or `out`;
/// diagnostics are a single line on `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses flat `key = value` lines; `#` starts a comment. Throws std::runtime_error
/// with the offending line on malformed input.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path);

}  // namespace singosc::cli
