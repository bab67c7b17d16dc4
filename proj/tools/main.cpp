#include "itc/cli.hpp"

int main(int argc, char** argv) { return itc::cli::main(argc, argv); }
