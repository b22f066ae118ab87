#include <iostream>

#include "dplap/cli.hpp"

int main(int argc, char** argv) { return dplap::cli::run(argc, argv, std::cout, std::cerr); }
