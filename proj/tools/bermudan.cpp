#include <iostream>

#include "bermudan/cli/commands.hpp"

int main(int argc, char** argv) { return bermudan::cli::run(argc, argv, std::cout, std::cerr); }
