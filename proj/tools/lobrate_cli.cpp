#include <iostream>

#include "lobrate/cli.hpp"

int main(int argc, char** argv) { return lobrate::cli::run(argc, argv, std::cout, std::cerr); }
