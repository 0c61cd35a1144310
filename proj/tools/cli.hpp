#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace perclab::cli {

enum ExitCode { kOk = 0, kUsage = 1, kNumeric = 2, kOracleMismatch = 3 };

// Runs one subcommand; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace perclab::cli
