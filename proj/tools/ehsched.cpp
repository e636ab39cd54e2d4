#include <iostream>
#include <string>
#include <vector>

#include "ehsched/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ehsched::run_cli(args, std::cout, std::cerr);
}
