#include <iostream>

#include "contactk/cli/app.hpp"

int main(int argc, char** argv) { return contactk::cli::run(argc, argv, std::cout, std::cerr); }
