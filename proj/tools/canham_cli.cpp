// canham: build, sweep, verify and export the genus-(m-1) comparison surfaces.
#include "cli_app.hpp"

#include <iostream>

int main(int argc, char** argv) { return canham::cli::run_cli(argc, argv, std::cout); }
