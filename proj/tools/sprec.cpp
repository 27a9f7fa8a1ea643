#include <iostream>

#include "sprec/cli.hpp"

int main(int argc, char** argv) {
  return sprec::run_cli(argc, argv, std::cout, std::cerr);
}
