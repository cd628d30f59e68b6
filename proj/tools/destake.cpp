#include <iostream>

#include "destake/cli.hpp"

int main(int argc, char** argv) { return destake::cli::run(argc, argv, std::cout, std::cerr); }
