#include <iostream>
#include <string>
#include <vector>

#include "trolleypack/cli.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return trolleypack::Dispatch(args, std::cout, std::cerr);
}
