#include <iostream>

#include "ermakov/app/commands.hpp"

int main(int argc, char** argv) { return ermakov::app::run_cli(argc, argv, std::cout, std::cerr); }
