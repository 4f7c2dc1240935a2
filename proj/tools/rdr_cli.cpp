#include <iostream>

#include "rdr/cli/commands.hpp"

int main(int argc, char** argv) { return rdr::cli::run(argc, argv, std::cout, std::cerr); }
