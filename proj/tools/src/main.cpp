#include <iostream>

#include "ustat_cli/cli.hpp"

int main(int argc, char** argv) { return ustat::cli::dispatch(argc, argv, std::cout, std::cerr); }
