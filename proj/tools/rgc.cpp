#include "rgc/cli.hpp"

int main(int argc, char** argv) { return rgc::cli::main(argc, argv); }
