#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fincat {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitDataError = 2;

/// Entry point of the `fincat` tool: train, predict, evaluate, serve.
/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fincat
