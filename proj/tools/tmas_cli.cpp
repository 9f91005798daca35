#include "tmas/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return tmas::run_cli(argc, argv, std::cout, std::cerr);
}
