#include <iostream>

#include "hecke/harness.hpp"

int main(int argc, char** argv) { return hecke::harness::run_cli(argc, argv, std::cout, std::cerr); }
