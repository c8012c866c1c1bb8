// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv) {
  return mixforge::cli::run(std::vector<std::string>(argv, argv + argc), std::cerr);
}
