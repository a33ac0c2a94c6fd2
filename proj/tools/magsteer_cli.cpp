#include <iostream>
#include <string>
#include <vector>

#include "magsteer/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return magsteer::run_cli(args, std::cout, std::cerr);
}
