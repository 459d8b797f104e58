#include <iostream>

#include "harmotop/cli.hpp"

int main(int argc, char** argv) { return harmotop::cli::run(argc, argv, std::cout, std::cerr); }
