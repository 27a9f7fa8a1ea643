#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sprec/linalg.hpp"

namespace sprec {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;
inline constexpr int kExitVerifierFailed = 3;

// Environment variable consulted for the default worker count.
inline constexpr const char* kWorkersEnv = "SPREC_WORKERS";

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

// "1..5", "2,4,8" or a mix such as "1..3,10".
std::vector<Index> parse_index_list(const std::string& text);

}  // namespace sprec
