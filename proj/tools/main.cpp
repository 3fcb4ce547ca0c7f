#include <iostream>

#include "wbz/cli.hpp"

int main(int argc, char** argv) { return wbz::run_cli(argc, argv, std::cout, std::cerr); }
