#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return rtree_cover::cli::run(argc, argv, std::cout, std::cerr); }
