#include <iostream>

#include "normcase/cli/commands.hpp"

int main(int argc, char** argv) { return normcase::cli::run_cli(argc, argv, std::cout, std::cerr); }
