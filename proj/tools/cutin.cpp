#include "cutin/cli.hpp"

int main(int argc, char** argv) { return cutin::cli::main(argc, argv); }
