#include <iostream>

#include "phasetv/cli.hpp"

int main(int argc, char** argv) { return phasetv::run_cli(argc, argv, std::cout, std::cerr); }
