#include <iostream>

#include "dpp/cli.hpp"

int main(int argc, char** argv) { return dpp::run_cli(argc, argv, std::cout, std::cerr); }
