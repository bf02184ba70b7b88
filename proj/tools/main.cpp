#include <iostream>

#include "frechet/cli.hpp"

int main(int argc, char** argv) {
  return frechet::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
