// spinflop_main.cpp — Entry point of the spinflop command-line tool

#include "spinflop/cli.hpp"

int main(int argc, char** argv) { return spinflop::cli::run(argc, argv); }
