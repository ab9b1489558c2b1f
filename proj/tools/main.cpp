#include <iostream>
#include <string>
#include <vector>

#include "chrg/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return chrg::run_cli(args, std::cout, std::cerr);
}
