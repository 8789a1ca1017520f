#include <iostream>

#include "hdpl/cli.hpp"

int main(int argc, char** argv) {
  return hdpl::cli::run({argv + 1, argv + argc}, std::cout, std::cerr, std::cin);
}
