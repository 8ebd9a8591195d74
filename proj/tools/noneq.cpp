#include "noneq/experiments/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return noneq::experiments::cli_dispatch(argc, argv, std::cout, std::cerr);
}
