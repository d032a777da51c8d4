#include <iostream>

#include "difflms/cli.hpp"

int main(int argc, char** argv) { return difflms::run_cli(argc, argv, std::cout, std::cerr); }
