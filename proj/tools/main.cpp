#include <iostream>

#include "signcrowd/cli/cli.hpp"

int main(int argc, char** argv) {
    return signcrowd::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
