#include <iostream>

#include "specsyn/cli.hpp"
#include "specsyn/config.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return specsyn::run_cli(args, std::cout, std::cerr, specsyn::process_environment());
}
