#include <iostream>
#include <string>
#include <vector>

#include "sbrl/cli_app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return sbrl::cli::run_cli(std::move(args), std::cout, std::cerr);
}
