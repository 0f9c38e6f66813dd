#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sbrl::cli {

/// Parse command-line arguments (program name excluded) and run the chosen
/// subcommand, writing to the supplied streams. Returns the process exit code.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace sbrl::cli
