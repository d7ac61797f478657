#include <iostream>

#include "wvdnet/cli.hpp"

int main(int argc, char** argv) {
  return wvdnet::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
