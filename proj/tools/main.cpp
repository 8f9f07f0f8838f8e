#include <iostream>

#include "loglin/cli.hpp"

int main(int argc, char** argv) { return loglin::run_cli(argc, argv, std::cout, std::cerr); }
