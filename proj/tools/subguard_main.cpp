#include <iostream>

#include "subguard/cli.hpp"

int main(int argc, char** argv) {
  return subguard::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
