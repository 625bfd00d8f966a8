#include "tensorpos/cli.hpp"

int main(int argc, char** argv) { return tensorpos::cli::run(argc, argv); }
