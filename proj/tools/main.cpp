#include <iostream>
#include <string>
#include <vector>

#include "otl/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return otl::run(args, std::cout, std::cerr);
}
