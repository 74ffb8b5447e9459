#include <iostream>

#include "ergograph/cli.hpp"

int main(int argc, char** argv) { return ergograph::cli::main_entry(argc, argv, std::cout, std::cerr); }
