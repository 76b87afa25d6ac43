#include <iostream>

#include "nlkit/cli.hpp"

int main(int argc, char** argv) { return nlkit::cli::run(argc, argv, std::cout, std::cerr); }
