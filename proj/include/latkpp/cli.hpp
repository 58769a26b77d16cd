#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace latkpp::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Exit codes: 0 all checks passed, 1 numerical failure or failed check,
/// 2 invalid invocation or configuration.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitUsage = 2;

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace latkpp::cli
