#include <iostream>

#include "spde_lab/cli.hpp"

int main(int argc, char** argv) { return spde_lab::run_cli(argc, argv, std::cout, std::cerr); }
