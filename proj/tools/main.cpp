#include <iostream>

#include "lzs/cli.hpp"

int main(int argc, char** argv) { return lzs::cli_dispatch(argc, argv, std::cout, std::cerr); }
