#include <iostream>

#include "phyfid/cli.hpp"

int main(int argc, char** argv) {
  return phyfid::cli::run(argc, argv, std::cout, std::cerr);
}
