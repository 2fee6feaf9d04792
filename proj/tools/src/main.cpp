#include <iostream>

#include "pwsreg/cli/commands.hpp"

int main(int argc, char** argv) { return pwsreg::cli::run(argc, argv, std::cout, std::cerr); }
