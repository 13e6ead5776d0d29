#include <iostream>

#include "psdpath_cli/cli.hpp"

int main(int argc, char** argv) { return psdpath::cli::run_cli(argc, argv, std::cout, std::cerr); }
