#include "c2d4/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return c2d4::run_cli(argc, argv, std::cout, std::cerr); }
