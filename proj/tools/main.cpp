#include "sphexp/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return sphexp::cli::run(argc, argv, std::cout, std::cerr);
}
