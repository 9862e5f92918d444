#include <iostream>

#include "crib/cli/commands.hpp"

int main(int argc, char** argv) { return crib::run_cli(argc, argv, std::cout, std::cerr); }
