#include <iostream>

#include "mycelogic/cli.hpp"

int main(int argc, char** argv) { return mycelogic::run_cli(argc, argv, std::cout, std::cerr); }
