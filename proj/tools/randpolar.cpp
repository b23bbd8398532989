#include <iostream>

#include "randpolar/cli.hpp"

int main(int argc, char** argv)
{
    return randpolar::cli_main(argc, argv, std::cout, std::cerr);
}
