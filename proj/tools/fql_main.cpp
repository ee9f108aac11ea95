#include <iostream>

#include "fql/cli.hpp"

int main(int argc, char** argv) { return fql::cli_main(argc, argv, std::cout); }
