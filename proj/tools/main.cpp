#include <iostream>

#include "thetawh/cli.hpp"

int main(int argc, char** argv) { return thetawh::cli::run(argc, argv, std::cout, std::cerr); }
