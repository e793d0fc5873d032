#include <iostream>

#include "vessel_lab/cli.hpp"

int main(int argc, char** argv) { return vessel_lab::cli::run(argc, argv, std::cout, std::cerr); }
