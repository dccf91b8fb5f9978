#include <iostream>
#include <string>
#include <vector>

#include "shapunc/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return shapunc::run_cli(args, std::cout, std::cerr);
}
