#include <iostream>
#include <string>
#include <vector>

#include "twsense/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return twsense::cli::run_command(args, std::cout, std::cerr);
}
