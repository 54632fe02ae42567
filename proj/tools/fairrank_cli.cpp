#include <iostream>

#include "fairrank/cli.hpp"

int main(int argc, char** argv) {
    return fairrank::run_cli(argc, argv, std::cout, std::cerr);
}
