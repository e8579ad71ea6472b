#include <iostream>

#include "hmix_cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return hmix::cli::run(args, std::cout, std::cerr);
}
