#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace uwbaoa::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

/// Runs `uwbaoa <subcommand> ...`; args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace uwbaoa::cli
