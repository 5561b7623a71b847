#include <iostream>

#include "permanental/cli.hpp"

int main(int argc, char** argv) { return perm::cli::run(argc, argv, std::cout, std::cerr); }
