#include "repeller/cli.hpp"

int main(int argc, char** argv) { return repeller::cli::main(argc, argv); }
