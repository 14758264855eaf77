#include <iostream>

#include "edgar_cli.hpp"

int main(int argc, char** argv) { return edgar::cli::run_cli(argc, argv, std::cout, std::cerr); }
