#include "cli.hpp"

int main(int argc, char** argv) { return sdgp::cli::run(argc, argv); }
