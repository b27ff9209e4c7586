#include "gbrtune/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return gbrtune::run_cli(args, std::cout, std::cerr);
}
