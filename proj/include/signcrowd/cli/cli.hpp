#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace signcrowd {

/// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitWithErrors = 1;
inline constexpr int kExitUsage = 2;

/// Runs the operator tool. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace signcrowd
