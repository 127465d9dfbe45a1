#include <iostream>

#include "p2k/cli.hpp"

int main(int argc, char** argv) { return p2k::run_cli(argc, argv, std::cout, std::cerr); }
