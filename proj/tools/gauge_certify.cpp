#include "gauge_certify/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return gauge_certify::run_cli(argc, argv, std::cout, std::cerr);
}
