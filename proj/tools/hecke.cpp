#include <iostream>
#include <string>
#include <vector>

#include "hecke/commands.hpp"

int main(int argc, char** argv) {
  return hecke::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
