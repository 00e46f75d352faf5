#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace persist::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitAnalytic = 3;

// Runs one subcommand. `args` excludes the program name. The JSON result goes
// to `out`, diagnostics to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace persist::cli
