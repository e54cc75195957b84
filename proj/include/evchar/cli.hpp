#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace evchar::cli {

// Exit codes shared by every subcommand.
enum Exit : int {
  kSuccess = 0,
  kCheckFailed = 1,
  kUnclassified = 2,
  kUsage = 3,
  kIoOrParse = 4,
};

/// Runs one invocation. `args` excludes the program name. Optional config
/// path default comes from the EVCHAR_CONFIG environment variable.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace evchar::cli
