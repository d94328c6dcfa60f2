#pragma once

#include <string>
#include <vector>

namespace de2gnn {

// Entry point for the command-line tool. args excludes the program name.
// Exit codes: 0 success, 2 configuration error, 3 data error, 4 numeric
// divergence.
int run_cli(const std::vector<std::string>& args);

}  // namespace de2gnn
