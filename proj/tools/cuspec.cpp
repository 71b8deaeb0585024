#include <iostream>
#include <string>
#include <vector>

#include "cuspec/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return cuspec::cli::run(args, std::cout, std::cerr);
}
