#include <iostream>

#include "hlsq/cli.hpp"

int main(int argc, char** argv) { return hlsq::run_command_line(argc, argv, std::cout, std::cerr); }
