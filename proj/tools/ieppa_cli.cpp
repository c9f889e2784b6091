#include <iostream>

#include "ieppa/cli.hpp"

int main(int argc, char** argv) { return ieppa::cli::Run(argc, argv, std::cout, std::cerr); }
