#include <iostream>

#include "sarena/cli/cli.hpp"

int main(int argc, char** argv) { return sarena::cli::run(argc, argv, std::cout, std::cerr); }
