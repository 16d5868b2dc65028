#include <iostream>
#include <string>
#include <vector>

#include "qmink/cli_io.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return qmink::run_cli(args, std::cout, std::cerr);
}
