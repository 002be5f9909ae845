#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cascade {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerdict = 1;
inline constexpr int kExitUsage = 2;

/// args excludes the program name. Exit codes: 0 ok, 1 verdict failure, 2 usage/config error.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cascade
