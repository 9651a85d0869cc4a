#pragma once

#include <string>
#include <vector>

namespace phs {

// Dispatches the run / check / sweep subcommands. args excludes the program
// name. Exit codes: 0 success, 2 config error, 3 numeric failure,
// 4 audit failure.
int run_command(const std::vector<std::string>& args);

}  // namespace phs
