#include <iostream>

#include "susyband/cli.hpp"

int main(int argc, char** argv) { return susyband::run_cli(argc, argv, std::cout, std::cerr); }
