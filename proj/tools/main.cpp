#include <iostream>

#include "rangeview/cli.hpp"

int main(int argc, char** argv) { return rangeview::cli_main(argc, argv, std::cout, std::cerr); }
