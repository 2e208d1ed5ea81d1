#include "texmetrics/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return texmetrics::cli_main(argc, argv, std::cout, std::cerr); }
