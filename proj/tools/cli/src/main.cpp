#include <iostream>

#include "bmdlimits_cli/cli.hpp"

int main(int argc, char** argv) { return bmdlimits::cli::run(argc, argv, std::cout, std::cerr); }
