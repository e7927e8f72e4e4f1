#include <iostream>
#include <string>
#include <vector>

#include "koch/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return koch::run(args, std::cout, std::cerr);
}
