#include <iostream>

#include "fairsel/cli.hpp"

int main(int argc, char** argv) { return fairsel::cli::run(argc, argv, std::cout, std::cerr); }
