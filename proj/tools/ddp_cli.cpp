#include <iostream>

#include "ddp/cli.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return ddp::cli::run(args, std::cout, std::cerr);
}
