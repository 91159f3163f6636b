// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "qhjm/cli.hpp"

int main(int argc, char** argv) { return qhjm::cli::run(argc, argv, std::cout, std::cerr); }
