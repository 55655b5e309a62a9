#include <iostream>

#include "condensed/cli.hpp"

int main(int argc, char** argv) {
  return condensed::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
