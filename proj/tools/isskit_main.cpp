#include <iostream>

#include "isskit/bench/cli.hpp"

int main(int argc, char** argv) {
  return isskit::bench::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
