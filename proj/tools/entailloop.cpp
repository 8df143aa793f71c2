#include <iostream>

#include "entailloop/cli.hpp"

int main(int argc, char** argv) { return entailloop::run_cli(argc, argv, std::cout, std::cerr); }
