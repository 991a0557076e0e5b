#include <iostream>

#include "flipit/cli.h"

int main(int argc, char** argv) {
  return flipit::run_cli(argc, argv, std::cout, std::cerr);
}
