#include <iostream>
#include <string>
#include <vector>

#include "uprop_cli/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return uprop::cli::run_cli(args, std::cout, std::cerr);
}
