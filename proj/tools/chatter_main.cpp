#include <iostream>

#include "chatter/cli.hpp"

int main(int argc, char** argv) { return chatter::cli::run(argc, argv, std::cout, std::cerr); }
