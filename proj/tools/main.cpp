#include <iostream>

#include "bandmatch/cli.hpp"

int main(int argc, char** argv) {
    return bandmatch::cli::run(argc, argv, std::cout, std::cerr);
}
