// SPDX-License-Identifier: Apache-2.0
#include "oddkit/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return oddkit::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
