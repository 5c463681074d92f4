#include <iostream>

#include "pavelka/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return pavelka::cli::run(args, std::cout, std::cerr);
}
