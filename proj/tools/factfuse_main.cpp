#include <iostream>

#include "factfuse/cli.hpp"

int main(int argc, char** argv) {
  return factfuse::run_cli(argc, argv, std::cout, std::cerr);
}
