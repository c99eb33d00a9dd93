#include "dualvol/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return dualvol::RunCli(argc, argv, std::cout, std::cerr); }
