#include <iostream>

#include "mixclust/harness/cli.hpp"

int main(int argc, char** argv) { return mixclust::harness::cli_dispatch(argc, argv, std::cout, std::cerr); }
