#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace inflex::cli {

/// Exit codes of every command.
enum ExitCode { kPass = 0, kCheckFailure = 1, kInvalidInput = 2 };

/// Runs one command. args excludes the program name. Reports go to the output
/// directory (--out, else $INFLEX_OUT_DIR, else the working directory).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "key = value" lines read back into flags: each key is a flag name without dashes.
std::vector<std::string> config_to_args(const std::string& text);

}  // namespace inflex::cli
