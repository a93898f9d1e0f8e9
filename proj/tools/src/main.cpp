#include <iostream>

#include "medner/cli/app.hpp"

int main(int argc, char** argv) {
  return medner::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
