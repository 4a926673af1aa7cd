#include <iostream>

#include "stepfloq/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return stepfloq::run_cli(args, std::cout, std::cerr);
}
