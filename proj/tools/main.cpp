#include <iostream>

#include "mls/cli/cli.hpp"

int main(int argc, char** argv) { return mls::cli::run(argc, argv, std::cout, std::cerr); }
