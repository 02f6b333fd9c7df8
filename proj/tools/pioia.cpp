#include <iostream>
#include <string>
#include <vector>

#include "pioia/cli.hpp"

int main(int argc, char** argv) {
  return pioia::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
