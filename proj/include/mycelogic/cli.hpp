#pragma once

#include <ostream>

namespace mycelogic {

// Seed splitting rule echoed into every manifest.
inline constexpr const char* kSeedRule =
    "component_seed = splitmix64(master ^ splitmix64(fnv1a64(component) + index))";

// Entry point of the command-line tool. Returns the process exit code:
// 0 when every output was written, 1 on a run failure, 2 on a usage error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mycelogic
