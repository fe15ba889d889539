#include <iostream>
#include <string>
#include <vector>

#include "collneg/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return collneg::cli::run(args, std::cin, std::cout, std::cerr);
}
