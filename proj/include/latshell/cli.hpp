#pragma once

#include <string>
#include <vector>

namespace latshell::cli {

// Experiment driver. args excludes the program name.
// Exit codes: 0 pass, 1 declared-tolerance failure, 2 usage/config error.
int run(const std::vector<std::string>& args);

} // namespace latshell::cli
