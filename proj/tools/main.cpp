#include <iostream>

#include "killing/cli.hpp"

int main(int argc, char** argv) { return killing::cli::run(argc, argv, std::cout, std::cerr); }
