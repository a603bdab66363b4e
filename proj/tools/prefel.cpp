#include <iostream>

#include "cli_commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return prefel::cli::run(args, std::cin, std::cout, std::cerr);
}
