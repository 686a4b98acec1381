#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace specsyn {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPipeline = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `specsyn` command. `args` excludes the program name.
/// `env` supplies SPECSYN_API_KEY, SPECSYN_CC and SPECSYN_VERIFIER.
/// Returns 0 on success, 1 on pipeline errors, 2 on usage or configuration
/// errors (including unreadable inputs).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const std::map<std::string, std::string>& env);

}  // namespace specsyn
