#include <iostream>

#include "spikelab/cli.hpp"

int main(int argc, char** argv) { return spikelab::dispatch(argc, argv, std::cout, std::cerr); }
