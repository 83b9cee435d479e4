#include <iostream>

#include "laxkit/cli/cli.hpp"

int main(int argc, char** argv) {
  return laxkit::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
