#include "mrbf/bench.hpp"

#include <iostream>

int main(int argc, char** argv) { return mrbf::cli_main(argc, argv, std::cout, std::cerr); }
