// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "vbohm/cli.hpp"

int main(int argc, char** argv) {
  return vbohm::cli::main_entry(argc, argv, std::cout, std::cerr);
}
