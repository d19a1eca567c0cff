#pragma once

#include <string>
#include <vector>

namespace qradon {

// Command-line front end.  Exit codes: 0 all executed checks pass (skips
// count as pass), 1 at least one check fails, 2 usage or configuration error.
int run_cli(int argc, char** argv);

// Convenience overload for tests: `args` excludes the program name.
int run_cli(const std::vector<std::string>& args);

}  // namespace qradon
