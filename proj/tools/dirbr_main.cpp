#include <iostream>

#include "dirbr/cli.hpp"

int main(int argc, char** argv) { return dirbr::cli::run(argc, argv, std::cout, std::cerr); }
