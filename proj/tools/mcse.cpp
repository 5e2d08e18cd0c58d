#include <iostream>

#include "mcse/cli.hpp"

int main(int argc, char** argv) {
  return mcse::parse_and_dispatch(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
