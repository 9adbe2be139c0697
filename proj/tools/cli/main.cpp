#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv) { return vote_audit::cli::run(argc, argv, std::cout, std::cerr); }
