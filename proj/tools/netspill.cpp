#include <iostream>

#include "netspill/cli.hpp"

int main(int argc, char** argv) {
  return netspill::cli::run(argc, argv, std::cout, std::cerr);
}
