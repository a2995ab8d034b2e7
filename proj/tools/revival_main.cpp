#include <iostream>

#include "revival/cli.hpp"

int main(int argc, char** argv) {
  return revival::cli::run(argc, argv, std::cout, std::cerr);
}
