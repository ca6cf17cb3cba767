#include <iostream>

#include "genet/cli/cli.hpp"

int main(int argc, char** argv) { return genet::cli::run(argc, argv, std::cout, std::cerr); }
