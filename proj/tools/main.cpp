#include "cgcn/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return cgcn::run_cli(argc, argv, std::cout, std::cerr); }
