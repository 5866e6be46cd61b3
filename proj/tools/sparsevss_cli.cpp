#include "sparsevss/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return sparsevss::cli::parse_and_dispatch(argc, argv, std::cout, std::cerr);
}
