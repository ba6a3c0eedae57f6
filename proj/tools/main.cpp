#include "dyadint/cli.hpp"

int main(int argc, char** argv) { return dyadint::cli::main(argc, argv); }
