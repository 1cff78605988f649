#include <iostream>

#include "cooc/commands.hpp"

int main(int argc, char** argv) { return cooc::run_cli(argc, argv, std::cerr); }
