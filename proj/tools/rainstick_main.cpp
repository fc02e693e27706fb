#include <iostream>

#include "rainstick/cli.hpp"

int main(int argc, char** argv) {
    return rainstick::cli::dispatch(argc, argv, std::cout, std::cerr);
}
